#include "gluepour/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace gluepour {

using nlohmann::json;

namespace {

double number(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw InvalidInput(std::string("missing or non-numeric field '") + key + "'");
  return j.at(key).get<double>();
}

const json& array_field(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array())
    throw InvalidInput(std::string("missing array field '") + key + "'");
  return j.at(key);
}

double parse_double(std::string_view field) {
  while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\r'))
    field.remove_suffix(1);
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw InvalidInput("bad number in CSV: '" + std::string(field) + "'");
  return value;
}

std::vector<std::vector<double>> parse_rows(std::string_view text,
                                            std::string_view header) {
  std::vector<std::vector<double>> rows;
  bool seen_header = false;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!seen_header) {
      if (line != header)
        throw InvalidInput("unexpected CSV header: '" + std::string(line) + "'");
      seen_header = true;
      continue;
    }
    std::vector<double> row;
    std::size_t pos = 0;
    for (;;) {
      const auto comma = line.find(',', pos);
      row.push_back(parse_double(line.substr(pos, comma - pos)));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    rows.push_back(std::move(row));
  }
  if (!seen_header) throw InvalidInput("empty CSV");
  return rows;
}

constexpr std::string_view kPolicyHeader = "t_start,t_end,duration,power,on";
constexpr std::string_view kSweepHeader = "epsilon,throughput";

}  // namespace

Scenario scenario_from_json(const json& j, bool clip, std::size_t* clipped) {
  if (!j.is_object()) throw InvalidInput("scenario must be a JSON object");
  std::vector<Arrival> arrivals;
  for (const auto& a : array_field(j, "arrivals"))
    arrivals.push_back({number(a, "t"), number(a, "e")});
  std::vector<GainChange> gains;
  for (const auto& g : array_field(j, "gains"))
    gains.push_back({number(g, "t"), number(g, "h")});

  const double e_max = number(j, "e_max");
  std::size_t cut = 0;
  if (clip) cut = clip_arrivals(arrivals, e_max);
  if (clipped) *clipped = cut;

  Scenario s = merge_event_streams(arrivals, gains, number(j, "T"), e_max,
                                   number(j, "epsilon"));
  if (j.contains("units")) s.units = j.at("units").get<std::string>();
  return s;
}

json scenario_to_json(const Scenario& s) {
  json arrivals = json::array();
  for (const auto& a : extract_arrivals(s))
    arrivals.push_back({{"t", a.time}, {"e", a.energy}});
  json gains = json::array();
  for (const auto& g : extract_gain_changes(s))
    gains.push_back({{"t", g.time}, {"h", g.gain}});
  json j = {{"T", s.horizon},
            {"e_max", s.battery_capacity},
            {"epsilon", s.processing_cost},
            {"arrivals", arrivals},
            {"gains", gains}};
  if (!s.units.empty()) j["units"] = s.units;
  return j;
}

TransmissionPolicy policy_from_json(const json& j) {
  if (!j.is_array()) throw InvalidInput("policy must be a JSON array");
  std::vector<EpochPolicy> entries;
  for (const auto& e : j) entries.push_back({number(e, "theta"), number(e, "p")});
  return TransmissionPolicy(std::move(entries));
}

json policy_to_json(const TransmissionPolicy& policy) {
  json j = json::array();
  for (const auto& e : policy) j.push_back({{"theta", e.on_duration}, {"p", e.power}});
  return j;
}

json feasibility_to_json(const FeasibilityReport& r) {
  return {{"feasible", r.feasible()},
          {"causality_ok", r.causality_ok},
          {"overflow_ok", r.overflow_ok},
          {"worst_causality_residual", r.worst_causality_residual},
          {"worst_overflow_residual", r.worst_overflow_residual},
          {"battery_before_arrival", r.trace.before_arrival},
          {"battery_after_arrival", r.trace.after_arrival}};
}

json report_to_json(const OptimalityReport& r) {
  auto verdict = [](const ConditionVerdict& v) {
    return json{{"ok", v.ok}, {"residual", v.residual}};
  };
  json boundaries = json::array();
  for (std::size_t j = 1; j < r.boundaries.size(); ++j)
    boundaries.push_back(to_string(r.boundaries[j]));
  json levels = json::array();
  for (double l : r.levels) levels.push_back(std::isnan(l) ? json(nullptr) : json(l));
  return {{"certified", r.certified},
          {"tol", r.tol},
          {"conditions",
           {{"partial_power", verdict(r.partial_power)},
            {"full_power", verdict(r.full_power)},
            {"level_rise", verdict(r.level_rise)},
            {"level_fall", verdict(r.level_fall)},
            {"idle_threshold", verdict(r.idle_threshold)},
            {"depletion", verdict(r.depletion)},
            {"feasibility", verdict(r.feasibility)}}},
          {"boundaries", boundaries},
          {"levels", levels},
          {"on_powers", r.on_powers},
          {"feasibility", feasibility_to_json(r.feasibility_report)}};
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Scenario load_scenario(const std::filesystem::path& path, bool clip,
                       std::size_t* clipped) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
  return scenario_from_json(j, clip, clipped);
}

TransmissionPolicy load_policy(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
  return policy_from_json(j);
}

std::string format_exact(double x) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

std::string policy_csv(const Scenario& s, const TransmissionPolicy& policy) {
  check_policy_shape(s, policy);
  struct Segment {
    double start, end, duration, power;
    bool on;
  };
  std::vector<Segment> segments;
  auto idle = [&](double start, double end) {
    if (!(end > start)) return;
    if (!segments.empty() && !segments.back().on) {
      segments.back().end = end;
      segments.back().duration = end - segments.back().start;
    } else {
      segments.push_back({start, end, end - start, 0.0, false});
    }
  };
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& e = s.epochs[i];
    const auto& p = policy[i];
    if (p.on_duration > 0.0) {
      const double on_end = std::min(e.end(), e.start + p.on_duration);
      segments.push_back({e.start, on_end, p.on_duration, p.power, true});
      idle(on_end, e.end());
    } else {
      idle(e.start, e.end());
    }
  }
  std::string out(kPolicyHeader);
  out += '\n';
  for (const auto& seg : segments) {
    out += format_exact(seg.start) + ',' + format_exact(seg.end) + ',' +
           format_exact(seg.duration) + ',' + format_exact(seg.power) + ',' +
           (seg.on ? "1" : "0") + '\n';
  }
  return out;
}

TransmissionPolicy parse_policy_csv(const Scenario& s, std::string_view text) {
  TransmissionPolicy policy(s.size());
  for (const auto& row : parse_rows(text, kPolicyHeader)) {
    if (row.size() != 5) throw InvalidInput("policy CSV rows need 5 columns");
    if (row[4] == 0.0) continue;
    const auto it = std::find_if(s.epochs.begin(), s.epochs.end(),
                                 [&](const Epoch& e) { return e.start == row[0]; });
    if (it == s.epochs.end())
      throw InvalidInput("on-segment does not start at an epoch boundary: " +
                         format_exact(row[0]));
    policy[static_cast<std::size_t>(it - s.epochs.begin())] = {row[2], row[3]};
  }
  check_policy_shape(s, policy);
  return policy;
}

std::string sweep_csv(const std::vector<SweepPoint>& points) {
  std::string out(kSweepHeader);
  out += '\n';
  for (const auto& p : points)
    out += format_exact(p.epsilon) + ',' + format_exact(p.throughput) + '\n';
  return out;
}

std::vector<SweepPoint> parse_sweep_csv(std::string_view text) {
  std::vector<SweepPoint> points;
  for (const auto& row : parse_rows(text, kSweepHeader)) {
    if (row.size() != 2) throw InvalidInput("sweep CSV rows need 2 columns");
    points.push_back({row[0], row[1]});
  }
  return points;
}

}  // namespace gluepour
