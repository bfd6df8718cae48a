#pragma once

#include <string>
#include <vector>

#include "gluepour/io.hpp"
#include "gluepour/scenario.hpp"

namespace gluepour {

/// 800x400 SVG of the power staircase, with epoch boundary ticks on the time
/// axis and a marker for every non-zero energy arrival.
std::string policy_svg(const Scenario& s, const TransmissionPolicy& policy);

/// 800x400 SVG line chart of throughput against processing cost.
std::string sweep_svg(const std::vector<SweepPoint>& points,
                      const std::string& units = "");

}  // namespace gluepour
