#include <algorithm>
#include <cmath>
#include <limits>

#include "gluepour/convex.hpp"

namespace gluepour {
namespace {

struct EpochBest {
  double theta = 0.0;
  double value = 0.0;
};

// Best on-time for a fixed energy budget c; the throughput is concave in Θ.
EpochBest best_on_time(double tau, double gain, double eps, double c) {
  if (c <= 0.0) return {};
  const double hi = eps > 0.0 ? std::min(tau, c / eps) : tau;
  auto f = [&](double th) {
    if (th <= 0.0) return 0.0;
    const double amp = std::max(0.0, c - eps * th);
    return 0.5 * th * std::log1p(gain * amp / th);
  };
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0;
  double b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < 100 && b - a > 1e-13 * hi; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    }
  }
  EpochBest best{0.5 * (a + b), f(0.5 * (a + b))};
  if (f(hi) >= best.value) best = {hi, f(hi)};
  return best;
}

// f_i tabulated on the lattice k·δ and read back by linear interpolation.
class EpochTable {
 public:
  EpochTable(const Epoch& e, double eps, double delta, double total)
      : delta_(delta) {
    const auto count = static_cast<std::size_t>(std::ceil(total / delta)) + 2;
    values_.resize(count);
    for (std::size_t k = 0; k < count; ++k)
      values_[k] =
          best_on_time(e.duration, e.gain, eps, static_cast<double>(k) * delta).value;
  }

  double operator()(double c) const {
    if (c <= 0.0) return 0.0;
    const double pos = c / delta_;
    const auto k = std::min(static_cast<std::size_t>(pos), values_.size() - 2);
    const double frac = pos - static_cast<double>(k);
    return values_[k] + frac * (values_[k + 1] - values_[k]);
  }

 private:
  double delta_;
  std::vector<double> values_;
};

// Lattice points in [lo, hi] plus both end points.
std::vector<double> grid(double lo, double hi, double delta) {
  std::vector<double> pts{lo};
  for (double k = std::ceil(lo / delta); k * delta < hi; k += 1.0)
    if (k * delta > lo) pts.push_back(k * delta);
  if (hi > lo) pts.push_back(hi);
  return pts;
}

}  // namespace

BruteForceResult brute_force_small(const Scenario& s, double grid_step) {
  s.validate();
  const std::size_t n = s.size();
  if (n > kBruteForceMaxEpochs)
    throw InvalidInput("brute_force_small: too many epochs");
  if (!(grid_step > 0.0)) throw InvalidInput("brute_force_small: grid_step must be positive");

  const double eps = s.processing_cost;
  const double total = s.total_energy();
  std::vector<double> hi(n), lo(n);
  double cum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    cum += s.epochs[k].arrival;
    hi[k] = cum;
    const double next = k + 1 < n ? s.epochs[k + 1].arrival : 0.0;
    lo[k] = std::max(0.0, cum + next - s.battery_capacity);
  }

  std::vector<EpochTable> tables;
  for (const auto& e : s.epochs) tables.emplace_back(e, eps, grid_step, total);

  // Cumulative consumption S_k after epoch k; S_{n-1} is the whole harvest.
  std::vector<double> best_cum(n, total);
  double best_value = -std::numeric_limits<double>::infinity();
  if (n == 1) {
    best_value = tables[0](total);
  } else {
    for (double s0 : grid(lo[0], hi[0], grid_step)) {
      const double head = tables[0](s0);
      if (n == 2) {
        const double v = head + tables[1](total - s0);
        if (v > best_value) {
          best_value = v;
          best_cum[0] = s0;
        }
        continue;
      }
      auto candidates = grid(std::max(lo[1], s0), hi[1], grid_step);
      if (s0 >= lo[1] && s0 <= hi[1]) candidates.push_back(s0);
      for (double s1 : candidates) {
        const double v = head + tables[1](s1 - s0) + tables[2](total - s1);
        if (v > best_value) {
          best_value = v;
          best_cum[0] = s0;
          best_cum[1] = s1;
        }
      }
    }
  }

  BruteForceResult result;
  result.policy = TransmissionPolicy(n);
  double prev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = std::max(0.0, best_cum[i] - prev);
    prev = best_cum[i];
    const auto& e = s.epochs[i];
    const EpochBest b = best_on_time(e.duration, e.gain, eps, c);
    if (b.theta > 0.0 && b.value > 0.0)
      result.policy[i] = {b.theta, std::max(0.0, c - eps * b.theta) / b.theta};
  }
  result.value = evaluate_throughput(s, result.policy);
  return result;
}

}  // namespace gluepour
