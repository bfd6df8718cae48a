#pragma once

#include <cstddef>
#include <vector>

#include "gluepour/kkt.hpp"
#include "gluepour/scenario.hpp"

namespace gluepour {

/// One harvested packet in backward pour order.
struct PourStep {
  std::size_t epoch = 0;  ///< epoch opened by the arrival
  double time = 0.0;
  double energy = 0.0;
  std::size_t first_admissible = 0;  ///< packet may feed epochs [first, n)
};

/// Battery-capacity wall at an arrival instant: at most `capacity` energy may
/// be carried across it from earlier arrivals.
struct CapacityWall {
  std::size_t epoch = 0;
  double capacity = 0.0;
};

struct PourPlan {
  std::vector<PourStep> steps;      ///< latest arrival first
  std::vector<CapacityWall> walls;  ///< ascending epoch index
};

PourPlan build_pour_plan(const Scenario& s);

struct DbgpResult {
  TransmissionPolicy policy;
  double throughput = 0.0;
  bool certified = false;
  OptimalityReport report;
};

/// Tolerance used to certify solver output with verify_optimality.
inline constexpr double kCertifyTol = 1e-6;

/**
 * Directional backward glue pouring.
 *
 * Packets are poured from the last non-zero arrival back to the first, each
 * one only into its own and later epochs and on top of what the later packets
 * already occupy. Energy carried across an arrival instant is limited by the
 * battery headroom left by that arrival; once a wall is saturated the epochs
 * behind it are frozen and the level keeps rising on the near side.
 *
 * The result is checked with verify_optimality; `certified` reports the
 * verdict.
 */
DbgpResult solve_dbgp(const Scenario& s);

}  // namespace gluepour
