#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace gluepour {

/// Raised for malformed scenarios, policies and event streams.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Energy packet harvested at `time`.
struct Arrival {
  double time = 0.0;
  double energy = 0.0;
};

/// Channel gain that holds from `time` until the next change.
struct GainChange {
  double time = 0.0;
  double gain = 0.0;
};

/// Interval between consecutive events. Gain is constant inside the epoch and
/// the only energy arrival happens at its start.
struct Epoch {
  double start = 0.0;
  double duration = 0.0;
  double gain = 0.0;
  double arrival = 0.0;

  double end() const { return start + duration; }
};

/**
 * Offline problem instance: the merged epoch timeline together with the
 * horizon, battery capacity and per-unit-time processing cost.
 *
 * All quantities share one consistent unit system; `units` is a free-form
 * label that only ends up in plots.
 */
struct Scenario {
  double horizon = 0.0;
  double battery_capacity = 0.0;
  double processing_cost = 0.0;
  std::vector<Epoch> epochs;
  std::string units;

  std::size_t size() const { return epochs.size(); }
  double total_energy() const;

  /// Throws InvalidInput if any structural invariant is broken.
  void validate() const;

  /// Copy with a different processing cost.
  Scenario with_processing_cost(double epsilon) const;
};

/// Builds a scenario from separate arrival and gain-change streams. Event
/// times become epoch boundaries; duplicate arrival times are summed.
Scenario merge_event_streams(const std::vector<Arrival>& arrivals,
                             const std::vector<GainChange>& gain_changes,
                             double horizon, double battery_capacity,
                             double processing_cost);

/// Inverse of merge_event_streams: one arrival and one gain change per epoch.
std::vector<Arrival> extract_arrivals(const Scenario& s);
std::vector<GainChange> extract_gain_changes(const Scenario& s);

/// Clamps arrival energies to `battery_capacity`. Returns how many were cut.
std::size_t clip_arrivals(std::vector<Arrival>& arrivals,
                          double battery_capacity);

/// Transmission on-time and power used inside one epoch. The on-interval is
/// placed at the start of the epoch.
struct EpochPolicy {
  double on_duration = 0.0;
  double power = 0.0;

  double amplifier_energy() const { return on_duration * power; }
};

class TransmissionPolicy {
 public:
  TransmissionPolicy() = default;
  explicit TransmissionPolicy(std::size_t n) : entries_(n) {}
  explicit TransmissionPolicy(std::vector<EpochPolicy> entries)
      : entries_(std::move(entries)) {}

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  EpochPolicy& operator[](std::size_t i) { return entries_[i]; }
  const EpochPolicy& operator[](std::size_t i) const { return entries_[i]; }

  const std::vector<EpochPolicy>& entries() const { return entries_; }

  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  /// Θ_i · p_i, the energy spent by the power amplifier in epoch i.
  double alpha(std::size_t i) const { return entries_[i].amplifier_energy(); }

  /// Θ_i (p_i + ε), everything drained from the battery in epoch i.
  double consumed(std::size_t i, double processing_cost) const {
    const auto& e = entries_[i];
    return e.on_duration * (e.power + processing_cost);
  }

 private:
  std::vector<EpochPolicy> entries_;
};

/// Stored energy at each epoch boundary. `before_arrival[j]` is the battery
/// content just before the arrival that opens epoch j (index n is the
/// deadline); `after_arrival[j]` includes that arrival.
struct BatteryTrace {
  std::vector<double> before_arrival;
  std::vector<double> after_arrival;
};

struct FeasibilityReport {
  bool causality_ok = true;
  bool overflow_ok = true;
  /// min_j before_arrival[j]; negative means energy was used before it arrived.
  double worst_causality_residual = 0.0;
  /// max_j after_arrival[j] - E_max; positive means the battery overflowed.
  double worst_overflow_residual = 0.0;
  BatteryTrace trace;

  bool feasible() const { return causality_ok && overflow_ok; }
};

inline constexpr double kDefaultValidationTol = 1e-9;

/// Throws InvalidInput on count mismatch, negative entries or Θ_i > τ_i.
void check_policy_shape(const Scenario& s, const TransmissionPolicy& policy);

BatteryTrace battery_trace(const Scenario& s, const TransmissionPolicy& policy);

FeasibilityReport validate_policy(const Scenario& s,
                                  const TransmissionPolicy& policy,
                                  double tol = kDefaultValidationTol);

/// Σ Θ_i/2 · ln(1 + h_i p_i), in nats.
double evaluate_throughput(const Scenario& s, const TransmissionPolicy& policy);

/// Σ Θ_i (p_i + ε).
double total_consumed(const Scenario& s, const TransmissionPolicy& policy);

}  // namespace gluepour
