#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gluepour/scenario.hpp"

namespace gluepour {

/**
 * The throughput problem in perspective form: per epoch the amplifier energy
 * α_i = Θ_i p_i and the on-time Θ_i. The objective Σ Θ_i/2 ln(1 + h_i α_i/Θ_i)
 * is jointly concave and all constraints are linear in (α, Θ).
 */
struct ConvexInstance {
  std::vector<double> durations;
  std::vector<double> gains;
  std::vector<double> arrivals;
  double processing_cost = 0.0;
  double battery_capacity = 0.0;

  static ConvexInstance from_scenario(const Scenario& s);

  std::size_t size() const { return durations.size(); }

  /// Largest violation of the causality, battery and box constraints at
  /// (α, Θ); zero for feasible points.
  double max_violation(std::span<const double> alpha,
                       std::span<const double> theta) const;
};

struct ObjectiveGradient {
  double value = 0.0;
  std::vector<double> grad_alpha;
  std::vector<double> grad_theta;
};

/**
 * Objective value and gradient in (α, Θ).
 *
 * The objective is extended by continuity with value 0 at Θ_i = 0. There the
 * gradient takes its limit along α_i = 0 (∂/∂α = h_i/2, ∂/∂Θ = 0) when α_i = 0,
 * and ∂/∂α = 0, ∂/∂Θ = +inf when α_i > 0.
 */
ObjectiveGradient objective_and_gradient(const ConvexInstance& inst,
                                         std::span<const double> alpha,
                                         std::span<const double> theta);

struct ConvexOptions {
  /// Target bound on the duality gap, in nats.
  double tol = 1e-11;
  /// Budget of Newton iterations across all barrier stages.
  std::size_t max_iterations = 100000;
};

/// One accepted Newton step.
struct ConvexIterate {
  std::size_t block = 0;
  double barrier_weight = 0.0;
  double objective = 0.0;
  /// Barrier-augmented objective that the stage maximizes.
  double merit = 0.0;
};

struct ConvexResult {
  TransmissionPolicy policy;
  double value = 0.0;
  std::vector<double> alpha;
  std::vector<double> theta;
  double duality_gap = 0.0;
  std::size_t iterations = 0;
  bool certified = false;
  std::vector<ConvexIterate> trace;
};

/**
 * Log-barrier interior-point solve of the perspective problem.
 *
 * Instants where the constraints force an empty battery split the horizon
 * into independent blocks. Each block starts from a strictly feasible point,
 * keeps total consumption equal to the harvested energy, and follows the
 * central path with damped Newton steps until the barrier gap drops below
 * `options.tol`. Near-zero on-times are then snapped to an idle epoch and
 * near-full ones to a full epoch with the same energy.
 */
ConvexResult solve_convex(const Scenario& s, const ConvexOptions& options = {});

struct BruteForceResult {
  TransmissionPolicy policy;
  double value = 0.0;
};

/// Largest epoch count brute_force_small accepts.
inline constexpr std::size_t kBruteForceMaxEpochs = 3;

/**
 * Exhaustive search for tiny instances.
 *
 * Enumerates per-epoch energy shares on a grid of spacing `grid_step`
 * (including the exact constraint end points) and, for every share, finds the
 * best on-time by golden-section search on the concave single-epoch throughput.
 */
BruteForceResult brute_force_small(const Scenario& s, double grid_step);

}  // namespace gluepour
