#include "gluepour/kkt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gluepour/pouring.hpp"

namespace gluepour {

const char* to_string(BoundaryState state) {
  switch (state) {
    case BoundaryState::Interior:
      return "interior";
    case BoundaryState::Empty:
      return "empty";
    case BoundaryState::Full:
      return "full";
    case BoundaryState::EmptyAndFull:
      return "empty+full";
  }
  return "?";
}

namespace {

enum class Usage { Idle, Partial, Full };

void worsen(ConditionVerdict& v, double residual, double tol) {
  v.residual = std::max(v.residual, residual);
  v.ok = v.residual <= tol;
}

}  // namespace

OptimalityReport verify_optimality(const Scenario& s,
                                   const TransmissionPolicy& policy,
                                   double tol) {
  check_policy_shape(s, policy);
  const std::size_t n = s.size();
  const double eps = s.processing_cost;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  OptimalityReport r;
  r.tol = tol;
  r.feasibility_report = validate_policy(s, policy, tol);
  const auto& trace = r.feasibility_report.trace;

  std::vector<Usage> usage(n);
  std::vector<double> thresholds(n);
  r.levels.assign(n, nan);
  r.on_powers.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& e = s.epochs[i];
    const auto& p = policy[i];
    r.on_powers[i] = on_power(e.gain, eps);
    thresholds[i] = 1.0 / e.gain + r.on_powers[i];
    if (p.on_duration == 0.0 || policy.consumed(i, eps) == 0.0) {
      usage[i] = Usage::Idle;
      continue;
    }
    usage[i] = (p.on_duration >= e.duration - tol) ? Usage::Full : Usage::Partial;
    r.levels[i] = p.power + 1.0 / e.gain;
    if (usage[i] == Usage::Partial)
      worsen(r.partial_power, std::abs(p.power - r.on_powers[i]), tol);
    else
      worsen(r.full_power, std::max(0.0, r.on_powers[i] - p.power), tol);
  }

  r.boundaries.assign(n, BoundaryState::Interior);
  for (std::size_t j = 1; j < n; ++j) {
    const bool empty = trace.before_arrival[j] < tol;
    const bool full = trace.after_arrival[j] > s.battery_capacity - tol;
    r.boundaries[j] = empty && full ? BoundaryState::EmptyAndFull
                      : empty       ? BoundaryState::Empty
                      : full        ? BoundaryState::Full
                                    : BoundaryState::Interior;
  }
  auto allows_rise = [](BoundaryState b) {
    return b == BoundaryState::Empty || b == BoundaryState::EmptyAndFull;
  };
  auto allows_fall = [](BoundaryState b) {
    return b == BoundaryState::Full || b == BoundaryState::EmptyAndFull;
  };

  // Consecutive active epochs, possibly with idle ones in between.
  std::size_t prev = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (usage[i] == Usage::Idle) continue;
    if (prev != n) {
      bool rise_ok = false;
      bool fall_ok = false;
      for (std::size_t j = prev + 1; j <= i; ++j) {
        rise_ok = rise_ok || allows_rise(r.boundaries[j]);
        fall_ok = fall_ok || allows_fall(r.boundaries[j]);
      }
      const double delta = r.levels[i] - r.levels[prev];
      if (!rise_ok) worsen(r.level_rise, std::max(0.0, delta), tol);
      if (!fall_ok) worsen(r.level_fall, std::max(0.0, -delta), tol);
    }
    prev = i;
  }

  // Idle epochs: the level of each run of epochs joined by interior boundaries
  // must fit under every idle threshold in the run, and the runs must be
  // ordered consistently with the binding boundaries between them.
  struct Run {
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    bool has_idle = false;
  };
  std::vector<Run> runs;
  std::vector<BoundaryState> between;
  double active_lo = std::numeric_limits<double>::infinity();
  double active_hi = -std::numeric_limits<double>::infinity();
  Run current;
  auto close_run = [&]() {
    if (active_lo <= active_hi) {
      current.lo = std::max(current.lo, active_lo - tol);
      current.hi = std::min(current.hi, active_hi + tol);
    }
    runs.push_back(current);
    current = Run{};
    active_lo = std::numeric_limits<double>::infinity();
    active_hi = -std::numeric_limits<double>::infinity();
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && r.boundaries[i] != BoundaryState::Interior) {
      close_run();
      between.push_back(r.boundaries[i]);
    }
    if (usage[i] == Usage::Idle) {
      current.has_idle = true;
      current.hi = std::min(current.hi, thresholds[i] + tol);
    } else {
      active_lo = std::min(active_lo, r.levels[i]);
      active_hi = std::max(active_hi, r.levels[i]);
    }
  }
  close_run();

  for (std::size_t k = 0; k + 1 < runs.size(); ++k) {
    if (between[k] == BoundaryState::Empty)
      runs[k + 1].lo = std::max(runs[k + 1].lo, runs[k].lo);
    else if (between[k] == BoundaryState::Full)
      runs[k + 1].hi = std::min(runs[k + 1].hi, runs[k].hi);
  }
  for (std::size_t k = runs.size() - 1; k-- > 0;) {
    if (between[k] == BoundaryState::Empty)
      runs[k].hi = std::min(runs[k].hi, runs[k + 1].hi);
    else if (between[k] == BoundaryState::Full)
      runs[k].lo = std::max(runs[k].lo, runs[k + 1].lo);
  }
  for (const auto& run : runs) {
    if (run.has_idle) worsen(r.idle_threshold, std::max(0.0, run.lo - run.hi), tol);
  }

  worsen(r.depletion, std::abs(trace.before_arrival[n]), tol);
  worsen(r.feasibility,
         std::max({0.0, -r.feasibility_report.worst_causality_residual,
                   r.feasibility_report.worst_overflow_residual}),
         tol);

  r.certified = r.partial_power.ok && r.full_power.ok && r.level_rise.ok &&
                r.level_fall.ok && r.idle_threshold.ok && r.depletion.ok &&
                r.feasibility.ok;
  return r;
}

}  // namespace gluepour
