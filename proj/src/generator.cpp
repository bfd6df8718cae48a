#include "gluepour/generator.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace gluepour {

std::uint64_t seed_from_env(std::uint64_t fallback) {
  const char* env = std::getenv("GLUEPOUR_SEED");
  if (env == nullptr || *env == '\0') return fallback;
  try {
    return std::stoull(env);
  } catch (const std::exception&) {
    throw InvalidInput(std::string("GLUEPOUR_SEED is not an integer: ") + env);
  }
}

Scenario random_scenario(std::mt19937_64& rng, std::size_t epochs,
                         const GeneratorRanges& r) {
  if (epochs == 0) throw InvalidInput("random_scenario: need at least one epoch");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  std::vector<Arrival> arrivals;
  std::vector<GainChange> gains;
  double t = 0.0;
  double largest = 0.0;
  for (std::size_t i = 0; i < epochs; ++i) {
    const double e = unit(rng) < r.zero_energy_share ? 0.0 : uniform(0.0, r.energy_max);
    arrivals.push_back({t, e});
    gains.push_back({t, uniform(r.gain_min, r.gain_max)});
    largest = std::max(largest, e);
    t += uniform(r.duration_min, r.duration_max);
  }
  const double e_max = largest > 0.0 ? largest * uniform(1.0, 3.0) : 1.0;
  const double eps =
      unit(rng) < r.zero_epsilon_share ? 0.0 : uniform(0.0, r.epsilon_max);
  return merge_event_streams(arrivals, gains, t, e_max, eps);
}

}  // namespace gluepour
