#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "gluepour/scenario.hpp"

namespace gluepour {

/**
 * Optimal transmit power while the transmitter is on, for channel gain `gain`
 * and processing cost `processing_cost`.
 *
 * Solves 1/(1/h + v) = ln(1 + h v) / (ε + v) for the unique v > 0. With the
 * substitution x = h v the condition reads (1 + x) ln(1 + x) - x = h ε, whose
 * left side is strictly increasing, so plain bisection on it is exact up to
 * rounding. Returns 0 when ε = 0 (the continuous limit of the root).
 */
double on_power(double gain, double processing_cost);

/// Best single-epoch policy for energy E, gain h and deadline T: run at the
/// on-power for E/(v*+ε) if that fits before T, otherwise stay on for the whole
/// window and burn the energy at E/T - ε.
EpochPolicy single_arrival_policy(double energy, double gain,
                                  double processing_cost, double deadline);

struct EnergyInterval {
  double min = 0.0;
  double max = 0.0;
};

/**
 * Per-epoch glue-pouring state.
 *
 * Every epoch has an activation threshold λ_i = 1/h_i + v_i*. At a glue level
 * L below λ_i it stays off; at L = λ_i it absorbs anything in
 * [0, τ_i (v_i* + ε)] by stretching its on-time at power v_i*; above λ_i it is
 * on for the whole epoch at power L - 1/h_i. `base` is energy already committed
 * to the epoch by earlier pours; `wall(j)` caps how much additional energy may
 * still cross the boundary into epoch j.
 */
class LevelAllocator {
 public:
  LevelAllocator(std::vector<double> durations, std::vector<double> gains,
                 double processing_cost);

  static LevelAllocator for_scenario(const Scenario& s);

  std::size_t size() const { return durations_.size(); }
  double processing_cost() const { return processing_cost_; }

  double duration(std::size_t i) const { return durations_[i]; }
  double gain(std::size_t i) const { return gains_[i]; }
  double on_power(std::size_t i) const { return on_powers_[i]; }

  double threshold(std::size_t i) const {
    return 1.0 / gains_[i] + on_powers_[i];
  }

  /// Energy soaked up at the threshold level before the epoch is fully on.
  double partial_capacity(std::size_t i) const {
    return durations_[i] * (on_powers_[i] + processing_cost_);
  }

  double base(std::size_t i) const { return base_[i]; }
  const std::vector<double>& base() const { return base_; }
  void set_base(std::size_t i, double energy);

  /// Remaining transfer capacity into epoch j (1 <= j < size()).
  double wall(std::size_t j) const { return walls_[j]; }
  void set_wall(std::size_t j, double capacity);
  void clear_walls();

  /// Consumption interval of epoch i at level L, ignoring its base.
  EnergyInterval consumption(std::size_t i, double level) const;

  /// Current glue level of an epoch that has consumed `energy`.
  double level_of(std::size_t i, double energy) const;

  /// Θ and p realizing `energy` in epoch i with the glue-pouring shape.
  EpochPolicy shape(std::size_t i, double energy) const;

 private:
  std::vector<double> durations_;
  std::vector<double> gains_;
  std::vector<double> on_powers_;
  std::vector<double> base_;
  std::vector<double> walls_;
  double processing_cost_ = 0.0;
};

/// Total consumption interval of all epochs at level L, counting each epoch's
/// base as a floor.
EnergyInterval level_energy_map(const LevelAllocator& alloc, double level);

struct Allocation {
  std::vector<EpochPolicy> epochs;
  std::vector<double> consumed;
  double level = 0.0;
  /// Poured energy that could not be placed (rounding residue only).
  double leftover = 0.0;

  TransmissionPolicy policy() const { return TransmissionPolicy(epochs); }
};

/// Absolute tolerance used when comparing glue levels.
inline constexpr double kLevelTol = 1e-12;

/**
 * Pours `energy` into the allocator starting at epoch `entry`, on top of the
 * existing base allocation.
 *
 * The glue level rises from zero; an epoch joins once the level reaches its
 * current level, epochs sitting exactly at their threshold are filled
 * earliest first, and a wall that runs out of capacity freezes everything to
 * its right while the level keeps rising on the left. Epochs before `entry`
 * are never touched.
 */
Allocation glue_pour(const LevelAllocator& alloc, double energy,
                     std::size_t entry = 0);

}  // namespace gluepour
