#include "gluepour/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <future>
#include <map>
#include <random>
#include <vector>

#include "gluepour/convex.hpp"
#include "gluepour/dbgp.hpp"
#include "gluepour/generator.hpp"
#include "gluepour/io.hpp"
#include "gluepour/kkt.hpp"
#include "gluepour/plot.hpp"

namespace gluepour {
namespace {

std::string g6(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

struct Solved {
  std::string name;
  TransmissionPolicy policy;
  double throughput = 0.0;
  OptimalityReport report;
  nlohmann::json extra;
};

Scenario load(const RunConfig& c, std::ostream& err) {
  std::size_t clipped = 0;
  Scenario s = load_scenario(c.scenario, c.clip, &clipped);
  if (clipped > 0) err << "note: clipped " << clipped << " arrival(s) to e_max\n";
  return s;
}

void print_policy(std::ostream& out, const Scenario& s, const TransmissionPolicy& p) {
  out << "  epoch  t_start  tau  theta  p\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    out << "  " << i << "  " << g6(s.epochs[i].start) << "  "
        << g6(s.epochs[i].duration) << "  " << g6(p[i].on_duration) << "  "
        << g6(p[i].power) << "\n";
  }
}

void print_report(std::ostream& out, const OptimalityReport& r) {
  auto line = [&](const char* name, const ConditionVerdict& v) {
    out << "  " << name << ": " << (v.ok ? "ok" : "FAIL") << " (residual "
        << g6(v.residual) << ")\n";
  };
  line("partial_power", r.partial_power);
  line("full_power", r.full_power);
  line("level_rise", r.level_rise);
  line("level_fall", r.level_fall);
  line("idle_threshold", r.idle_threshold);
  line("depletion", r.depletion);
  line("feasibility", r.feasibility);
}

}  // namespace

int cmd_solve(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const Scenario s = load(c, err);
  const double tol = c.tol.value_or(1e-5);

  std::vector<Solved> runs;
  if (c.solver != SolverChoice::Convex) {
    DbgpResult d = solve_dbgp(s);
    runs.push_back({"dbgp", d.policy, d.throughput, verify_optimality(s, d.policy, tol), {}});
  }
  if (c.solver != SolverChoice::Dbgp) {
    ConvexOptions opt;
    opt.max_iterations = c.max_iterations;
    ConvexResult r = solve_convex(s, opt);
    runs.push_back({"convex", r.policy, r.value, verify_optimality(s, r.policy, tol),
                    {{"iterations", r.iterations},
                     {"duality_gap", r.duality_gap},
                     {"converged", r.certified}}});
    if (!r.certified) runs.back().report.certified = false;
  }

  if (!c.out.empty()) std::filesystem::create_directories(c.out);
  bool all_certified = true;
  for (const auto& run : runs) {
    all_certified = all_certified && run.report.certified;
    out << run.name << ": throughput " << g6(run.throughput) << " nats, "
        << (run.report.certified ? "certified" : "NOT certified") << " (tol "
        << g6(tol) << ")\n";
    print_policy(out, s, run.policy);
    nlohmann::json report = {{"solver", run.name},
                             {"throughput", run.throughput},
                             {"optimality", report_to_json(run.report)}};
    if (!run.extra.is_null()) report["convex"] = run.extra;
    if (!c.out.empty()) {
      write_text(c.out / ("policy_" + run.name + ".json"),
                 policy_to_json(run.policy).dump(2) + "\n");
      write_text(c.out / ("policy_" + run.name + ".csv"), policy_csv(s, run.policy));
      write_text(c.out / ("policy_" + run.name + ".svg"), policy_svg(s, run.policy));
      if (c.report)
        write_text(c.out / ("report_" + run.name + ".json"), report.dump(2) + "\n");
    } else if (c.report) {
      out << report.dump(2) << "\n";
    }
  }
  if (runs.size() == 2)
    out << "throughput gap: " << g6(std::abs(runs[0].throughput - runs[1].throughput))
        << " nats\n";
  return all_certified ? kExitOk : kExitUncertified;
}

int cmd_sweep_epsilon(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.steps < 2) throw InvalidInput("sweep needs at least 2 steps");
  if (!(c.eps_min >= 0.0) || !(c.eps_max >= c.eps_min))
    throw InvalidInput("sweep range must satisfy 0 <= eps-min <= eps-max");
  const Scenario base = load(c, err);

  std::vector<std::future<DbgpResult>> jobs;
  std::vector<double> grid;
  for (std::size_t k = 0; k < c.steps; ++k) {
    const double eps =
        c.eps_min + (c.eps_max - c.eps_min) * static_cast<double>(k) /
                        static_cast<double>(c.steps - 1);
    grid.push_back(eps);
    jobs.push_back(std::async(std::launch::async, [&base, eps] {
      return solve_dbgp(base.with_processing_cost(eps));
    }));
  }
  std::vector<SweepPoint> points;
  bool all_certified = true;
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    const DbgpResult r = jobs[k].get();
    all_certified = all_certified && r.certified;
    points.push_back({grid[k], r.throughput});
  }
  for (std::size_t k = 1; k < points.size(); ++k) {
    if (points[k].throughput > points[k - 1].throughput) {
      err << "error: throughput increases from " << g6(points[k - 1].throughput)
          << " at eps " << g6(points[k - 1].epsilon) << " to "
          << g6(points[k].throughput) << " at eps " << g6(points[k].epsilon) << "\n";
      return kExitError;
    }
  }
  for (const auto& p : points) out << g6(p.epsilon) << "  " << g6(p.throughput) << "\n";
  if (!c.out.empty()) {
    std::filesystem::create_directories(c.out);
    write_text(c.out / "sweep.csv", sweep_csv(points));
    write_text(c.out / "sweep.svg", sweep_svg(points, base.units));
  }
  if (!all_certified) err << "warning: some sweep points are not certified\n";
  return all_certified ? kExitOk : kExitUncertified;
}

int cmd_validate(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const Scenario s = load(c, err);
  const TransmissionPolicy p = load_policy(c.policy);
  const double tol = c.tol.value_or(kDefaultValidationTol);
  const FeasibilityReport r = validate_policy(s, p, tol);
  out << "causality: " << (r.causality_ok ? "ok" : "VIOLATED") << " (min stored "
      << g6(r.worst_causality_residual) << ")\n"
      << "overflow: " << (r.overflow_ok ? "ok" : "VIOLATED") << " (max excess "
      << g6(r.worst_overflow_residual) << ")\n"
      << "throughput: " << g6(evaluate_throughput(s, p)) << " nats\n";
  if (c.report) out << feasibility_to_json(r).dump(2) << "\n";
  return r.feasible() ? kExitOk : kExitUncertified;
}

int cmd_certify(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const Scenario s = load(c, err);
  const TransmissionPolicy p = load_policy(c.policy);
  const OptimalityReport r =
      verify_optimality(s, p, c.tol.value_or(kDefaultValidationTol));
  out << (r.certified ? "certified" : "NOT certified") << " (tol " << g6(r.tol)
      << ")\n";
  print_report(out, r);
  if (c.report) out << report_to_json(r).dump(2) << "\n";
  return r.certified ? kExitOk : kExitUncertified;
}

int cmd_generate(const RunConfig& c, std::ostream& out, std::ostream&) {
  const std::uint64_t seed = c.seed ? *c.seed : seed_from_env(1);
  std::mt19937_64 rng(seed);
  const Scenario s = random_scenario(rng, c.epochs);
  const std::string text = scenario_to_json(s).dump(2) + "\n";
  if (c.out.empty())
    out << text;
  else
    write_text(c.out, text);
  return kExitOk;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Throughput-optimal transmission with a processing cost"};
  app.require_subcommand(1);

  const std::map<std::string, SolverChoice> solvers{
      {"dbgp", SolverChoice::Dbgp},
      {"convex", SolverChoice::Convex},
      {"both", SolverChoice::Both}};
  auto tol_option = [&](CLI::App* sub, const char* what) {
    sub->add_option_function<double>(
        "--tol", [&](double v) { c.tol = v; }, what);
  };

  auto* solve = app.add_subcommand("solve", "Solve a scenario");
  solve->add_option("--scenario", c.scenario, "Scenario JSON")->required();
  solve->add_option("--solver", c.solver, "dbgp, convex or both")
      ->transform(CLI::CheckedTransformer(solvers, CLI::ignore_case));
  tol_option(solve, "Certification tolerance (default 1e-5)");
  solve->add_flag("--clip", c.clip, "Clamp arrivals above e_max");
  solve->add_option("--out", c.out, "Directory for policy and report files");
  solve->add_flag("--report", c.report, "Emit the optimality report as JSON");
  solve->add_option("--max-iter", c.max_iterations, "Newton budget of the convex solver");

  auto* sweep = app.add_subcommand("sweep", "Throughput over a range of processing costs");
  sweep->add_option("--scenario", c.scenario, "Scenario JSON")->required();
  sweep->add_option("--eps-min", c.eps_min, "Smallest processing cost")->required();
  sweep->add_option("--eps-max", c.eps_max, "Largest processing cost")->required();
  sweep->add_option("--steps", c.steps, "Number of evenly spaced points")->required();
  sweep->add_option("--out", c.out, "Directory for sweep.csv and sweep.svg");
  sweep->add_flag("--clip", c.clip, "Clamp arrivals above e_max");

  auto* validate = app.add_subcommand("validate", "Check a policy for feasibility");
  validate->add_option("--scenario", c.scenario, "Scenario JSON")->required();
  validate->add_option("--policy", c.policy, "Policy JSON")->required();
  tol_option(validate, "Tolerance (default 1e-9)");
  validate->add_flag("--report", c.report, "Emit the report as JSON");
  validate->add_flag("--clip", c.clip, "Clamp arrivals above e_max");

  auto* certify = app.add_subcommand("certify", "Check a policy for optimality");
  certify->add_option("--scenario", c.scenario, "Scenario JSON")->required();
  certify->add_option("--policy", c.policy, "Policy JSON")->required();
  tol_option(certify, "Tolerance (default 1e-9)");
  certify->add_flag("--report", c.report, "Emit the report as JSON");
  certify->add_flag("--clip", c.clip, "Clamp arrivals above e_max");

  auto* generate = app.add_subcommand("generate", "Write a random scenario");
  generate->add_option("--epochs", c.epochs, "Number of epochs")->check(CLI::PositiveNumber);
  generate->add_option_function<std::uint64_t>(
      "--seed", [&](std::uint64_t v) { c.seed = v; }, "Seed (default GLUEPOUR_SEED or 1)");
  generate->add_option("--out", c.out, "Output file (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (solve->parsed()) return cmd_solve(c, out, err);
    if (sweep->parsed()) return cmd_sweep_epsilon(c, out, err);
    if (validate->parsed()) return cmd_validate(c, out, err);
    if (certify->parsed()) return cmd_certify(c, out, err);
    if (generate->parsed()) return cmd_generate(c, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace gluepour
