#include "gluepour/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace gluepour {

namespace {

void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidInput(message);
}

bool finite(double x) { return std::isfinite(x); }

// Boundary mismatch allowed between start_i + τ_i and start_{i+1}.
double boundary_slack(double horizon) { return 1e-12 * std::max(1.0, horizon); }

}  // namespace

double Scenario::total_energy() const {
  double total = 0.0;
  for (const auto& e : epochs) total += e.arrival;
  return total;
}

void Scenario::validate() const {
  require(finite(horizon) && horizon > 0.0, "horizon must be finite and > 0");
  require(finite(battery_capacity) && battery_capacity > 0.0,
          "battery capacity must be finite and > 0");
  require(finite(processing_cost) && processing_cost >= 0.0,
          "processing cost must be finite and >= 0");
  require(!epochs.empty(), "scenario has no epochs");
  require(epochs.front().start == 0.0, "first epoch must start at t = 0");

  const double slack = boundary_slack(horizon);
  for (std::size_t i = 0; i < epochs.size(); ++i) {
    const auto& e = epochs[i];
    const std::string where = "epoch " + std::to_string(i) + ": ";
    require(finite(e.start) && finite(e.duration) && finite(e.gain) &&
                finite(e.arrival),
            where + "non-finite field");
    require(e.duration > 0.0, where + "duration must be > 0");
    require(e.gain > 0.0, where + "channel gain must be > 0");
    require(e.arrival >= 0.0, where + "arrival energy must be >= 0");
    require(e.arrival <= battery_capacity,
            where + "arrival energy exceeds battery capacity");
    if (i + 1 < epochs.size()) {
      require(std::abs(e.end() - epochs[i + 1].start) <= slack,
              where + "epochs are not contiguous");
    }
  }
  require(std::abs(epochs.back().end() - horizon) <= slack,
          "epochs must end at the horizon");
}

Scenario Scenario::with_processing_cost(double epsilon) const {
  Scenario copy = *this;
  copy.processing_cost = epsilon;
  return copy;
}

Scenario merge_event_streams(const std::vector<Arrival>& arrivals,
                             const std::vector<GainChange>& gain_changes,
                             double horizon, double battery_capacity,
                             double processing_cost) {
  require(finite(horizon) && horizon > 0.0, "horizon must be finite and > 0");
  require(finite(battery_capacity) && battery_capacity > 0.0,
          "battery capacity must be finite and > 0");
  require(finite(processing_cost) && processing_cost >= 0.0,
          "processing cost must be finite and >= 0");

  std::map<double, double> energy_at;
  for (const auto& a : arrivals) {
    require(finite(a.time) && finite(a.energy), "non-finite arrival");
    require(a.time >= 0.0 && a.time < horizon,
            "arrival time outside [0, T): " + std::to_string(a.time));
    require(a.energy >= 0.0, "negative arrival energy");
    energy_at[a.time] += a.energy;
  }
  for (const auto& [t, e] : energy_at) {
    require(e <= battery_capacity,
            "arrival at t = " + std::to_string(t) +
                " exceeds battery capacity (use clipping to accept it)");
  }

  std::map<double, double> gain_at;
  for (const auto& g : gain_changes) {
    require(finite(g.time) && finite(g.gain), "non-finite gain change");
    require(g.time >= 0.0 && g.time < horizon,
            "gain change time outside [0, T): " + std::to_string(g.time));
    require(g.gain > 0.0, "channel gain must be > 0");
    auto [it, inserted] = gain_at.emplace(g.time, g.gain);
    require(inserted || it->second == g.gain,
            "conflicting gains at t = " + std::to_string(g.time));
  }
  require(gain_at.count(0.0) == 1, "a gain change at t = 0 is required");

  std::vector<double> boundaries;
  boundaries.reserve(energy_at.size() + gain_at.size() + 1);
  for (const auto& [t, e] : energy_at) boundaries.push_back(t);
  for (const auto& [t, g] : gain_at) boundaries.push_back(t);
  std::sort(boundaries.begin(), boundaries.end());
  boundaries.erase(std::unique(boundaries.begin(), boundaries.end()),
                   boundaries.end());
  boundaries.push_back(horizon);

  Scenario s;
  s.horizon = horizon;
  s.battery_capacity = battery_capacity;
  s.processing_cost = processing_cost;
  s.epochs.reserve(boundaries.size() - 1);

  double gain = gain_at.at(0.0);
  for (std::size_t i = 0; i + 1 < boundaries.size(); ++i) {
    const double t = boundaries[i];
    if (auto g = gain_at.find(t); g != gain_at.end()) gain = g->second;
    Epoch e;
    e.start = t;
    e.duration = boundaries[i + 1] - t;
    e.gain = gain;
    if (auto a = energy_at.find(t); a != energy_at.end()) e.arrival = a->second;
    s.epochs.push_back(e);
  }
  s.validate();
  return s;
}

std::vector<Arrival> extract_arrivals(const Scenario& s) {
  std::vector<Arrival> out;
  out.reserve(s.size());
  for (const auto& e : s.epochs) out.push_back({e.start, e.arrival});
  return out;
}

std::vector<GainChange> extract_gain_changes(const Scenario& s) {
  std::vector<GainChange> out;
  out.reserve(s.size());
  for (const auto& e : s.epochs) out.push_back({e.start, e.gain});
  return out;
}

std::size_t clip_arrivals(std::vector<Arrival>& arrivals,
                          double battery_capacity) {
  // Clip the per-instant total so that split packets at one time are handled
  // the same way merge_event_streams sums them.
  std::map<double, double> total_at;
  for (const auto& a : arrivals) total_at[a.time] += a.energy;

  std::size_t clipped = 0;
  std::vector<Arrival> out;
  out.reserve(total_at.size());
  for (const auto& [t, e] : total_at) {
    if (e > battery_capacity) {
      ++clipped;
      out.push_back({t, battery_capacity});
    } else {
      out.push_back({t, e});
    }
  }
  arrivals = std::move(out);
  return clipped;
}

void check_policy_shape(const Scenario& s, const TransmissionPolicy& policy) {
  require(policy.size() == s.size(),
          "policy has " + std::to_string(policy.size()) +
              " entries but the scenario has " + std::to_string(s.size()) +
              " epochs");
  for (std::size_t i = 0; i < policy.size(); ++i) {
    const auto& p = policy[i];
    const std::string where = "policy entry " + std::to_string(i) + ": ";
    require(finite(p.on_duration) && finite(p.power), where + "non-finite");
    require(p.on_duration >= 0.0, where + "negative on-duration");
    require(p.power >= 0.0, where + "negative power");
    require(p.on_duration <= s.epochs[i].duration * (1.0 + 1e-12),
            where + "on-duration exceeds epoch length");
  }
}

BatteryTrace battery_trace(const Scenario& s, const TransmissionPolicy& policy) {
  check_policy_shape(s, policy);
  const std::size_t n = s.size();
  BatteryTrace trace;
  trace.before_arrival.resize(n + 1);
  trace.after_arrival.resize(n);

  double stored = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    trace.before_arrival[j] = stored;
    stored += s.epochs[j].arrival;
    trace.after_arrival[j] = stored;
    stored -= policy.consumed(j, s.processing_cost);
  }
  trace.before_arrival[n] = stored;
  return trace;
}

FeasibilityReport validate_policy(const Scenario& s,
                                  const TransmissionPolicy& policy,
                                  double tol) {
  FeasibilityReport report;
  report.trace = battery_trace(s, policy);

  // Stored energy only decreases inside an epoch, so checking the end of
  // each epoch and the instant after each arrival covers all t in [0, T].
  const auto& before = report.trace.before_arrival;
  const auto& after = report.trace.after_arrival;
  report.worst_causality_residual =
      *std::min_element(before.begin() + 1, before.end());
  double worst_overflow = -s.battery_capacity;
  for (double stored : after)
    worst_overflow = std::max(worst_overflow, stored - s.battery_capacity);
  report.worst_overflow_residual = worst_overflow;

  report.causality_ok = report.worst_causality_residual >= -tol;
  report.overflow_ok = report.worst_overflow_residual <= tol;
  return report;
}

double evaluate_throughput(const Scenario& s, const TransmissionPolicy& policy) {
  check_policy_shape(s, policy);
  double total = 0.0;
  for (std::size_t i = 0; i < policy.size(); ++i) {
    const auto& p = policy[i];
    if (p.on_duration == 0.0) continue;
    total += 0.5 * p.on_duration * std::log1p(s.epochs[i].gain * p.power);
  }
  return total;
}

double total_consumed(const Scenario& s, const TransmissionPolicy& policy) {
  check_policy_shape(s, policy);
  double total = 0.0;
  for (std::size_t i = 0; i < policy.size(); ++i)
    total += policy.consumed(i, s.processing_cost);
  return total;
}

}  // namespace gluepour
