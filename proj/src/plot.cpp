#include "gluepour/plot.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace gluepour {
namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 20.0;
constexpr double kBottom = 50.0;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// Maps data coordinates onto the plot area of the fixed viewport.
struct Axes {
  double x0, x1, y0, y1;

  double px(double x) const {
    return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight);
  }
  double py(double y) const {
    return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom);
  }
};

void open_svg(std::ostringstream& out) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"400\" "
         "viewBox=\"0 0 800 400\">\n"
      << "<rect width=\"800\" height=\"400\" fill=\"white\"/>\n";
}

void frame(std::ostringstream& out, const Axes& ax, const std::string& xlabel,
           const std::string& ylabel) {
  out << "<g stroke=\"black\" stroke-width=\"1\">\n"
      << "<line x1=\"" << fmt(ax.px(ax.x0)) << "\" y1=\"" << fmt(ax.py(ax.y0))
      << "\" x2=\"" << fmt(ax.px(ax.x1)) << "\" y2=\"" << fmt(ax.py(ax.y0)) << "\"/>\n"
      << "<line x1=\"" << fmt(ax.px(ax.x0)) << "\" y1=\"" << fmt(ax.py(ax.y0))
      << "\" x2=\"" << fmt(ax.px(ax.x0)) << "\" y2=\"" << fmt(ax.py(ax.y1)) << "\"/>\n"
      << "</g>\n";
  out << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int k = 0; k <= 4; ++k) {
    const double y = ax.y0 + (ax.y1 - ax.y0) * k / 4.0;
    out << "<text x=\"" << fmt(kLeft - 6) << "\" y=\"" << fmt(ax.py(y) + 4)
        << "\" text-anchor=\"end\">" << fmt(y) << "</text>\n";
  }
  for (int k = 0; k <= 5; ++k) {
    const double x = ax.x0 + (ax.x1 - ax.x0) * k / 5.0;
    out << "<text x=\"" << fmt(ax.px(x)) << "\" y=\"" << fmt(kHeight - kBottom + 18)
        << "\" text-anchor=\"middle\">" << fmt(x) << "</text>\n";
  }
  out << "<text x=\"" << fmt((kLeft + kWidth - kRight) / 2) << "\" y=\""
      << fmt(kHeight - 8) << "\" text-anchor=\"middle\">" << xlabel << "</text>\n"
      << "<text x=\"16\" y=\"" << fmt(kHeight / 2)
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << fmt(kHeight / 2)
      << ")\">" << ylabel << "</text>\n"
      << "</g>\n";
}

std::string with_units(const std::string& label, const std::string& units) {
  return units.empty() ? label : label + " [" + units + "]";
}

}  // namespace

std::string policy_svg(const Scenario& s, const TransmissionPolicy& policy) {
  check_policy_shape(s, policy);
  double top = 0.0;
  for (const auto& p : policy) top = std::max(top, p.power);
  const Axes ax{0.0, s.horizon, 0.0, top > 0.0 ? 1.1 * top : 1.0};

  std::ostringstream out;
  open_svg(out);
  frame(out, ax, with_units("time", s.units), "power");

  // Staircase: on-interval at the epoch start, zero for the rest of it.
  std::ostringstream path;
  path << "M" << fmt(ax.px(0)) << "," << fmt(ax.py(0));
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& e = s.epochs[i];
    const auto& p = policy[i];
    if (p.on_duration > 0.0) {
      const double off = std::min(e.end(), e.start + p.on_duration);
      path << " L" << fmt(ax.px(e.start)) << "," << fmt(ax.py(p.power)) << " L"
           << fmt(ax.px(off)) << "," << fmt(ax.py(p.power)) << " L" << fmt(ax.px(off))
           << "," << fmt(ax.py(0));
    }
    path << " L" << fmt(ax.px(e.end())) << "," << fmt(ax.py(0));
  }
  out << "<path d=\"" << path.str()
      << "\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\"/>\n";

  out << "<g stroke=\"gray\" stroke-width=\"1\">\n";
  for (const auto& e : s.epochs) {
    out << "<line x1=\"" << fmt(ax.px(e.start)) << "\" y1=\"" << fmt(ax.py(0))
        << "\" x2=\"" << fmt(ax.px(e.start)) << "\" y2=\"" << fmt(ax.py(0) + 6)
        << "\"/>\n";
  }
  out << "</g>\n<g fill=\"darkorange\">\n";
  for (const auto& e : s.epochs) {
    if (e.arrival <= 0.0) continue;
    const double x = ax.px(e.start);
    const double y = ax.py(ax.y1) + 2;
    out << "<polygon points=\"" << fmt(x - 5) << "," << fmt(y) << " " << fmt(x + 5)
        << "," << fmt(y) << " " << fmt(x) << "," << fmt(y + 9) << "\"><title>E = "
        << fmt(e.arrival) << "</title></polygon>\n";
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

std::string sweep_svg(const std::vector<SweepPoint>& points,
                      const std::string& units) {
  double x1 = 1.0;
  double y1 = 1.0;
  double x0 = 0.0;
  if (!points.empty()) {
    x0 = points.front().epsilon;
    x1 = points.back().epsilon > x0 ? points.back().epsilon : x0 + 1.0;
    double top = 0.0;
    for (const auto& p : points) top = std::max(top, p.throughput);
    y1 = top > 0.0 ? 1.1 * top : 1.0;
  }
  const Axes ax{x0, x1, 0.0, y1};

  std::ostringstream out;
  open_svg(out);
  frame(out, ax, with_units("processing cost", units), "throughput [nats]");
  std::ostringstream line;
  for (const auto& p : points)
    line << fmt(ax.px(p.epsilon)) << "," << fmt(ax.py(p.throughput)) << " ";
  out << "<polyline points=\"" << line.str()
      << "\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\"/>\n<g fill=\"steelblue\">\n";
  for (const auto& p : points)
    out << "<circle cx=\"" << fmt(ax.px(p.epsilon)) << "\" cy=\""
        << fmt(ax.py(p.throughput)) << "\" r=\"3\"/>\n";
  out << "</g>\n</svg>\n";
  return out.str();
}

}  // namespace gluepour
