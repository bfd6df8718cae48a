#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gluepour/kkt.hpp"
#include "gluepour/scenario.hpp"

namespace gluepour {

/**
 * Scenario file:
 *
 *   {"T": 10, "e_max": 5, "epsilon": 1,
 *    "arrivals": [{"t": 0, "e": 1.1}, ...],
 *    "gains":    [{"t": 0, "h": 0.7}, ...],
 *    "units": "uJ, uW, s"}
 *
 * With `clip` set, arrivals above e_max are clamped instead of rejected and
 * the number of clamped packets is stored in `clipped` when non-null.
 */
Scenario scenario_from_json(const nlohmann::json& j, bool clip = false,
                            std::size_t* clipped = nullptr);
nlohmann::json scenario_to_json(const Scenario& s);

/// Policy file: array of {"theta": Θ_i, "p": p_i}, one entry per epoch.
TransmissionPolicy policy_from_json(const nlohmann::json& j);
nlohmann::json policy_to_json(const TransmissionPolicy& policy);

nlohmann::json feasibility_to_json(const FeasibilityReport& r);
nlohmann::json report_to_json(const OptimalityReport& r);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

Scenario load_scenario(const std::filesystem::path& path, bool clip = false,
                       std::size_t* clipped = nullptr);
TransmissionPolicy load_policy(const std::filesystem::path& path);

/// Shortest decimal form that parses back to the same double.
std::string format_exact(double x);

/**
 * Policy as a time series of segments with columns
 * t_start,t_end,duration,power,on. Each epoch contributes its on-interval and
 * its idle tail; consecutive idle segments are merged. `duration` carries Θ_i
 * exactly so that parse_policy_csv restores the policy bit for bit.
 */
std::string policy_csv(const Scenario& s, const TransmissionPolicy& policy);
TransmissionPolicy parse_policy_csv(const Scenario& s, std::string_view text);

struct SweepPoint {
  double epsilon = 0.0;
  double throughput = 0.0;
};

std::string sweep_csv(const std::vector<SweepPoint>& points);
std::vector<SweepPoint> parse_sweep_csv(std::string_view text);

}  // namespace gluepour
