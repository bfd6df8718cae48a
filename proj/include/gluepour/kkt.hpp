#pragma once

#include <string>
#include <vector>

#include "gluepour/scenario.hpp"

namespace gluepour {

/// Battery state at the boundary between two epochs, as seen by the verifier.
enum class BoundaryState { Interior, Empty, Full, EmptyAndFull };

const char* to_string(BoundaryState state);

struct ConditionVerdict {
  bool ok = true;
  double residual = 0.0;
};

/**
 * Structural optimality certificate for a policy.
 *
 * The glue level of an active epoch is p_i + 1/h_i. An optimal policy runs
 * partially-used epochs at the on-power, never runs a full epoch below it,
 * keeps the level constant across boundaries where the battery is neither
 * empty nor full, lets it rise only where the battery runs empty and fall only
 * where it is full, leaves idle epochs with a threshold at or above the
 * surrounding level, and ends with an empty battery.
 */
struct OptimalityReport {
  double tol = 0.0;

  ConditionVerdict partial_power;  ///< max |p_i - v_i*| over partial epochs
  ConditionVerdict full_power;     ///< max (v_i* - p_i)+ over full epochs
  ConditionVerdict level_rise;     ///< largest rise with no empty boundary
  ConditionVerdict level_fall;     ///< largest fall with no full boundary
  ConditionVerdict idle_threshold; ///< idle epochs below the ambient level
  ConditionVerdict depletion;      ///< energy left at the deadline
  ConditionVerdict feasibility;    ///< causality / overflow violation

  FeasibilityReport feasibility_report;
  /// boundaries[j] sits between epoch j-1 and epoch j; entry 0 is unused.
  std::vector<BoundaryState> boundaries;
  /// Glue level per epoch; NaN for idle epochs.
  std::vector<double> levels;
  std::vector<double> on_powers;

  bool certified = false;
};

OptimalityReport verify_optimality(const Scenario& s,
                                   const TransmissionPolicy& policy,
                                   double tol = kDefaultValidationTol);

}  // namespace gluepour
