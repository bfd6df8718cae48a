// Acceptance suite. Each check prints one PASS/FAIL line; pass a check name to
// run only that one. Exit status is non-zero when any selected check fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <future>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "gluepour/cli.hpp"
#include "gluepour/convex.hpp"
#include "gluepour/dbgp.hpp"
#include "gluepour/generator.hpp"
#include "gluepour/io.hpp"
#include "gluepour/kkt.hpp"
#include "gluepour/pouring.hpp"

using namespace gluepour;

namespace {

constexpr double kThroughputTol = 0.03;     // nats, against rounded targets
constexpr double kValueTol = 0.02;    // powers and durations given to two decimals
constexpr double kFullOnTol = 1e-6;         // Θ = τ
constexpr double kOnPowerTol = 0.01;
constexpr double kOracleTol = 1e-3;         // nats, solver vs solver vs grid
constexpr double kGridStep = 1e-3;
constexpr double kDbgpCertifyTol = 1e-6;
constexpr double kConvexCertifyTol = 1e-5;
constexpr double kPerturbation = 0.05;      // energy moved between epochs
constexpr double kGradientRelTol = 1e-5;
constexpr double kFiniteStep = 1e-6;
constexpr double kConservationTol = 1e-6;
constexpr double kScalingTol = 1e-6;

constexpr std::uint64_t kDefaultSeed = 424242;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string g(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

Scenario reference(double eps) {
  return merge_event_streams({{0, 1.1}, {0.5, 3.2}, {4, 2.8}, {5.1, 1.4}, {7, 3.1}},
                             {{0, 0.7}, {0.5, 0.2}, {4, 0.4}, {5.1, 0.3}, {7, 0.7}}, 10.0,
                             5.0, eps);
}

struct Solved {
  std::string name;
  TransmissionPolicy policy;
  double value;
};

std::vector<Solved> both_solvers(const Scenario& s) {
  const DbgpResult d = solve_dbgp(s);
  const ConvexResult c = solve_convex(s);
  return {{"dbgp", d.policy, d.throughput}, {"convex", c.policy, c.value}};
}

// Worst |x_i - want_i| and its index.
std::pair<double, std::size_t> worst_gap(const std::vector<double>& x,
                                         const std::vector<double>& want) {
  std::pair<double, std::size_t> w{0.0, 0};
  for (std::size_t i = 0; i < x.size(); ++i)
    if (std::abs(x[i] - want[i]) > w.first) w = {std::abs(x[i] - want[i]), i};
  return w;
}

Outcome reference_eps0() {
  const Scenario s = reference(0.0);
  const std::vector<double> want{2.17, 0.29, 2.01, 1.18, 1.65};
  Outcome o;
  std::ostringstream msg;
  for (const auto& r : both_solvers(s)) {
    std::vector<double> p;
    double full_gap = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      p.push_back(r.policy[i].power);
      full_gap = std::max(full_gap, std::abs(r.policy[i].on_duration - s.epochs[i].duration));
    }
    const auto [gap, at] = worst_gap(p, want);
    const bool ok = std::abs(r.value - 2.11) <= kThroughputTol &&
                    gap <= kValueTol && full_gap <= kFullOnTol;
    o.pass = o.pass && ok;
    msg << r.name << " B=" << g(r.value) << " worst |p-fig|=" << g(gap) << " (epoch "
        << at + 1 << ": " << g(p[at]) << " vs " << g(want[at]) << ") max|theta-tau|="
        << g(full_gap) << "; ";
  }
  o.detail = msg.str();
  return o;
}

Outcome reference_eps1() {
  const Scenario s = reference(1.0);
  const std::vector<double> want_p{1.99, 3.48, 3.05, 0.0, 1.99};
  const std::vector<double> want_theta{0.36, 0.22, 1.10, 0.0, 1.66};
  Outcome o;
  std::ostringstream msg;
  for (const auto& r : both_solvers(s)) {
    std::vector<double> p, th;
    for (const auto& e : r.policy) {
      p.push_back(e.power);
      th.push_back(e.on_duration);
    }
    const auto [pgap, pat] = worst_gap(p, want_p);
    const auto [tgap, tat] = worst_gap(th, want_theta);
    const bool value_ok = std::abs(r.value - 1.39) <= kThroughputTol;
    bool ok = value_ok && pgap <= kValueTol && tgap <= kValueTol;
    // An equally good optimum may spread on-time differently over epochs that
    // share a threshold; those epochs run at the on-power and are partial.
    if (!ok && value_ok && verify_optimality(s, r.policy, kDbgpCertifyTol).certified) {
      bool only_ties = true;
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (std::abs(p[i] - want_p[i]) <= kValueTol &&
            std::abs(th[i] - want_theta[i]) <= kValueTol)
          continue;
        bool tied = false;
        for (std::size_t j = 0; j < s.size(); ++j)
          tied = tied || (j != i && s.epochs[j].gain == s.epochs[i].gain);
        const double v = on_power(s.epochs[i].gain, 1.0);
        const bool partial = th[i] < s.epochs[i].duration &&
                             (th[i] == 0.0 || std::abs(p[i] - v) <= kValueTol);
        only_ties = only_ties && tied && partial;
      }
      ok = only_ties;
      if (ok) msg << r.name << " (tied redistribution) ";
    }
    o.pass = o.pass && ok;
    msg << r.name << " B=" << g(r.value) << " worst |p-fig|=" << g(pgap) << " (epoch "
        << pat + 1 << ": " << g(p[pat]) << " vs " << g(want_p[pat]) << ") worst |theta-fig|="
        << g(tgap) << " (epoch " << tat + 1 << "); ";
  }
  o.detail = msg.str();
  return o;
}

Outcome on_power_values() {
  const double a = on_power(0.2, 1.0);
  const double b = on_power(0.7, 1.0);
  bool zero = true;
  for (double h : {0.2, 0.3, 0.4, 0.7}) zero = zero && on_power(h, 0.0) == 0.0;
  return {std::abs(a - 3.48) <= kOnPowerTol && std::abs(b - 1.99) <= kOnPowerTol && zero,
          "v*(0.2,1)=" + g(a) + " v*(0.7,1)=" + g(b) +
              " v*(h,0)==0: " + (zero ? "yes" : "no")};
}

Outcome epsilon_sweep() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() /
                       ("gluepour_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  write_text(dir / "reference.json", scenario_to_json(reference(0.0)).dump());
  const std::string scen = (dir / "reference.json").string();
  const std::string out = (dir / "sweep").string();
  const char* argv[] = {"gluepour", "sweep",     "--scenario", scen.c_str(),
                        "--eps-min", "0",        "--eps-max",  "1",
                        "--steps",  "11",        "--out",      out.c_str()};
  std::ostringstream sink, err;
  const int code = run_cli(12, argv, sink, err);
  if (code != kExitOk && code != kExitUncertified) {
    fs::remove_all(dir);
    return {false, "sweep command failed: " + err.str()};
  }
  const auto pts = parse_sweep_csv(read_text(dir / "sweep" / "sweep.csv"));
  fs::remove_all(dir);
  bool monotone = pts.size() == 11;
  for (std::size_t k = 1; k < pts.size(); ++k)
    monotone = monotone && pts[k].throughput <= pts[k - 1].throughput;
  const bool ends = std::abs(pts.front().throughput - 2.11) <= kThroughputTol &&
                    std::abs(pts.back().throughput - 1.39) <= kThroughputTol;
  return {monotone && ends, std::to_string(pts.size()) + " points, non-increasing: " +
                                (monotone ? "yes" : "no") + ", B(0)=" +
                                g(pts.front().throughput) + " B(1)=" +
                                g(pts.back().throughput)};
}

// Scenarios shared by the oracle, certification and conservation checks.
struct Corpus {
  std::vector<Scenario> small;  // N <= 3
  std::vector<Scenario> medium; // N <= 6
};

const Corpus& corpus() {
  static const Corpus c = [] {
    Corpus out;
    std::mt19937_64 rng(seed_from_env(kDefaultSeed));
    for (int k = 0; k < 200; ++k) out.small.push_back(random_scenario(rng, 1 + k % 3));
    for (int k = 0; k < 100; ++k) out.medium.push_back(random_scenario(rng, 1 + k % 6));
    return out;
  }();
  return c;
}

struct SolvedCase {
  Scenario scenario;
  DbgpResult dbgp;
  ConvexResult convex;
  std::optional<BruteForceResult> brute;
};

const std::vector<SolvedCase>& solved_corpus() {
  static const std::vector<SolvedCase> cases = [] {
    std::vector<std::future<SolvedCase>> jobs;
    auto launch = [&](const Scenario& s, bool brute) {
      jobs.push_back(std::async(std::launch::async, [s, brute] {
        SolvedCase c{s, solve_dbgp(s), solve_convex(s), std::nullopt};
        if (brute) c.brute = brute_force_small(s, kGridStep);
        return c;
      }));
    };
    for (const auto& s : corpus().small) launch(s, true);
    for (const auto& s : corpus().medium) launch(s, false);
    std::vector<SolvedCase> out;
    for (auto& j : jobs) out.push_back(j.get());
    return out;
  }();
  return cases;
}

Outcome oracle_equivalence() {
  double worst_small = 0.0;
  double worst_medium = 0.0;
  for (const auto& c : solved_corpus()) {
    const double dc = std::abs(c.dbgp.throughput - c.convex.value);
    if (c.brute) {
      worst_small = std::max({worst_small, dc, std::abs(c.dbgp.throughput - c.brute->value),
                              std::abs(c.convex.value - c.brute->value)});
    } else {
      worst_medium = std::max(worst_medium, dc);
    }
  }
  return {worst_small <= kOracleTol && worst_medium <= kOracleTol,
          "N<=3 (200): worst pairwise gap " + g(worst_small) + " nats; N<=6 (100): " +
              g(worst_medium) + " nats"};
}

Outcome certification() {
  int failures = 0;
  int perturbed = 0;
  int perturbed_passing = 0;
  for (const auto& c : solved_corpus()) {
    const Scenario& s = c.scenario;
    if (!verify_optimality(s, c.dbgp.policy, kDbgpCertifyTol).certified) ++failures;
    if (!verify_optimality(s, c.convex.policy, kConvexCertifyTol).certified) ++failures;

    // Move energy from the largest consumer to every other epoch in turn.
    const LevelAllocator alloc = LevelAllocator::for_scenario(s);
    std::vector<double> used(s.size());
    for (std::size_t i = 0; i < s.size(); ++i)
      used[i] = c.dbgp.policy.consumed(i, s.processing_cost);
    const std::size_t from =
        static_cast<std::size_t>(std::max_element(used.begin(), used.end()) - used.begin());
    if (used[from] < kPerturbation) continue;
    for (std::size_t to = 0; to < s.size(); ++to) {
      if (to == from) continue;
      std::vector<double> moved = used;
      moved[from] -= kPerturbation;
      moved[to] += kPerturbation;
      TransmissionPolicy p(s.size());
      for (std::size_t i = 0; i < s.size(); ++i) p[i] = alloc.shape(i, moved[i]);
      ++perturbed;
      if (verify_optimality(s, p, kDbgpCertifyTol).certified) ++perturbed_passing;
    }
  }
  return {failures == 0 && perturbed_passing == 0 && perturbed > 0,
          std::to_string(failures) + " uncertified solver outputs of " +
              std::to_string(2 * solved_corpus().size()) + "; " +
              std::to_string(perturbed_passing) + " of " + std::to_string(perturbed) +
              " perturbed policies certified"};
}

Outcome gradient_check() {
  std::mt19937_64 rng(seed_from_env(kDefaultSeed) + 7);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const ConvexInstance inst = ConvexInstance::from_scenario(random_scenario(rng, 1 + k % 6));
    std::vector<double> alpha(inst.size()), theta(inst.size());
    for (std::size_t i = 0; i < inst.size(); ++i) {
      alpha[i] = u(rng);
      theta[i] = u(rng);
    }
    const ObjectiveGradient grad = objective_and_gradient(inst, alpha, theta);
    for (std::size_t i = 0; i < inst.size(); ++i) {
      for (auto* x : {&alpha, &theta}) {
        const double keep = (*x)[i];
        (*x)[i] = keep + kFiniteStep;
        const double up = objective_and_gradient(inst, alpha, theta).value;
        (*x)[i] = keep - kFiniteStep;
        const double down = objective_and_gradient(inst, alpha, theta).value;
        (*x)[i] = keep;
        const double fd = (up - down) / (2.0 * kFiniteStep);
        const double an = x == &alpha ? grad.grad_alpha[i] : grad.grad_theta[i];
        worst = std::max(worst, std::abs(fd - an) / std::max(std::abs(an), 1e-12));
      }
    }
  }
  return {worst <= kGradientRelTol, "worst relative error " + g(worst) + " over 100 points"};
}

Outcome conservation() {
  double worst_depletion = 0.0;
  double worst_overflow = -1e300;
  double lowest = 1e300;
  auto check = [&](const Scenario& s, const TransmissionPolicy& p) {
    worst_depletion =
        std::max(worst_depletion, std::abs(total_consumed(s, p) - s.total_energy()));
    const BatteryTrace t = battery_trace(s, p);
    for (double b : t.before_arrival) lowest = std::min(lowest, b);
    for (double b : t.after_arrival) {
      lowest = std::min(lowest, b);
      worst_overflow = std::max(worst_overflow, b - s.battery_capacity);
    }
  };
  for (const auto& c : solved_corpus()) {
    check(c.scenario, c.dbgp.policy);
    check(c.scenario, c.convex.policy);
    if (c.brute) check(c.scenario, c.brute->policy);
  }
  return {worst_depletion < kConservationTol && worst_overflow <= kConservationTol &&
              lowest >= -kConservationTol,
          "max |consumed - harvested| " + g(worst_depletion) + ", max excess over E_max " +
              g(worst_overflow) + ", min stored " + g(lowest)};
}

Outcome scaling() {
  std::mt19937_64 rng(seed_from_env(kDefaultSeed) + 9);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Scenario s = random_scenario(rng, 1 + k % 6);
    const DbgpResult base = solve_dbgp(s);
    for (double c : {0.1, 10.0}) {
      Scenario t = s;
      t.battery_capacity /= c;
      t.processing_cost /= c;
      for (auto& e : t.epochs) {
        e.gain *= c;
        e.arrival /= c;
      }
      const DbgpResult r = solve_dbgp(t);
      worst = std::max(worst, std::abs(r.throughput - base.throughput));
      for (std::size_t i = 0; i < s.size(); ++i) {
        worst = std::max(worst, std::abs(r.policy[i].on_duration - base.policy[i].on_duration));
        worst = std::max(worst, std::abs(c * r.policy[i].power - base.policy[i].power));
      }
    }
  }
  return {worst <= kScalingTol, "worst deviation " + g(worst) + " over 20 scenarios"};
}

struct Check {
  const char* name;
  const char* what;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Check> checks{
      {"reference_eps0", "reference scenario without processing cost", reference_eps0},
      {"reference_eps1", "reference scenario with processing cost 1", reference_eps1},
      {"on_power", "on-power values", on_power_values},
      {"epsilon_sweep", "throughput sweep over processing cost", epsilon_sweep},
      {"oracle_equivalence", "dbgp, convex and brute force agree", oracle_equivalence},
      {"certification", "optimality certificates and perturbations", certification},
      {"gradient", "objective gradient vs finite differences", gradient_check},
      {"conservation", "depletion and battery bounds", conservation},
      {"scaling", "scaling equivariance", scaling},
  };
  bool all = true;
  int selected = 0;
  for (const auto& c : checks) {
    if (argc > 1 && std::string(argv[1]) != c.name) continue;
    ++selected;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all = all && o.pass;
    std::printf("%s %-20s %s: %s\n", o.pass ? "PASS" : "FAIL", c.name, c.what,
                o.detail.c_str());
  }
  if (selected == 0) {
    std::fprintf(stderr, "unknown check %s\n", argv[1]);
    return 1;
  }
  return all ? 0 : 1;
}
