#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

#include "gluepour/scenario.hpp"

namespace gluepour {

/// Seed from GLUEPOUR_SEED when set, `fallback` otherwise.
std::uint64_t seed_from_env(std::uint64_t fallback);

struct GeneratorRanges {
  double duration_min = 0.2, duration_max = 2.0;
  double gain_min = 0.2, gain_max = 2.0;
  double energy_max = 1.5;
  double epsilon_max = 1.5;
  /// Probability that an arrival is empty.
  double zero_energy_share = 0.15;
  /// Probability that ε is exactly zero.
  double zero_epsilon_share = 0.15;
};

/// Random scenario with `epochs` epochs, one arrival and one gain per epoch.
/// The battery holds between 1 and 3 times the largest packet.
Scenario random_scenario(std::mt19937_64& rng, std::size_t epochs,
                         const GeneratorRanges& ranges = {});

}  // namespace gluepour
