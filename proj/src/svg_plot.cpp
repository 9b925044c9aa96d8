#include "sparsehfs/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "sparsehfs/error.hpp"

namespace shfs {
namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  if (std::abs(v) >= 1000 || (std::abs(v - std::round(v)) < 1e-9)) {
    std::snprintf(buf, sizeof(buf), "%.0f", v);
  } else {
    std::snprintf(buf, sizeof(buf), "%.3g", v);
  }
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_line_chart(const PlotSpec& spec,
                              const std::vector<PlotSeries>& series) {
  if (series.empty()) throw ValidationError("plot needs at least one series");
  double x_lo = std::numeric_limits<double>::infinity();
  double x_hi = -x_lo;
  double y_lo = x_lo;
  double y_hi = -x_lo;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) {
      throw ValidationError("series '" + s.name + "' has mismatched x/y");
    }
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x_lo = std::min(x_lo, s.x[i]);
      x_hi = std::max(x_hi, s.x[i]);
      y_lo = std::min(y_lo, s.y[i]);
      y_hi = std::max(y_hi, s.y[i]);
    }
  }
  if (!std::isfinite(x_lo)) { x_lo = 0.0; x_hi = 1.0; y_lo = 0.0; y_hi = 1.0; }
  if (spec.y_min < spec.y_max) {
    y_lo = spec.y_min;
    y_hi = spec.y_max;
  }
  // Degenerate ranges (single point) get a unit window.
  if (x_hi - x_lo <= 0.0) { x_lo -= 0.5; x_hi += 0.5; }
  if (y_hi - y_lo <= 0.0) { y_lo -= 0.5; y_hi += 0.5; }

  const double left = 70, right = 150, top = 40, bottom = 55;
  const double pw = spec.width - left - right;
  const double ph = spec.height - top - bottom;
  auto sx = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * pw; };
  auto sy = [&](double y) { return top + ph - (y - y_lo) / (y_hi - y_lo) * ph; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width
      << "\" height=\"" << spec.height << "\" viewBox=\"0 0 " << spec.width
      << ' ' << spec.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << fmt(spec.width / 2.0) << "\" y=\"22\" text-anchor=\"middle\" "
      << "font-size=\"15\">" << escape(spec.title) << "</text>\n";
  out << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\""
      << fmt(pw) << "\" height=\"" << fmt(ph)
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  constexpr int kTicks = 5;
  for (int t = 0; t <= kTicks; ++t) {
    const double xv = x_lo + (x_hi - x_lo) * t / kTicks;
    const double yv = y_lo + (y_hi - y_lo) * t / kTicks;
    out << "<line x1=\"" << fmt(sx(xv)) << "\" y1=\"" << fmt(top + ph)
        << "\" x2=\"" << fmt(sx(xv)) << "\" y2=\"" << fmt(top + ph + 5)
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << fmt(sx(xv)) << "\" y=\"" << fmt(top + ph + 18)
        << "\" text-anchor=\"middle\">" << tick_label(xv) << "</text>\n";
    out << "<line x1=\"" << fmt(left - 5) << "\" y1=\"" << fmt(sy(yv))
        << "\" x2=\"" << fmt(left + pw) << "\" y2=\"" << fmt(sy(yv))
        << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << fmt(left - 8) << "\" y=\"" << fmt(sy(yv) + 4)
        << "\" text-anchor=\"end\">" << tick_label(yv) << "</text>\n";
  }
  out << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"" << fmt(spec.height - 12.0)
      << "\" text-anchor=\"middle\">" << escape(spec.x_label) << "</text>\n";
  out << "<text x=\"18\" y=\"" << fmt(top + ph / 2)
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << fmt(top + ph / 2)
      << ")\">" << escape(spec.y_label) << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    std::string points;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if (!points.empty()) points += ' ';
      points += fmt(sx(s.x[i])) + "," + fmt(sy(s.y[i]));
    }
    out << "<polyline fill=\"none\" stroke=\"" << s.color
        << "\" stroke-width=\"2\" points=\"" << points << "\"/>\n";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      out << "<circle cx=\"" << fmt(sx(s.x[i])) << "\" cy=\"" << fmt(sy(s.y[i]))
          << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
    }
    const double ly = top + 10 + 18.0 * static_cast<double>(si);
    out << "<line x1=\"" << fmt(left + pw + 10) << "\" y1=\"" << fmt(ly)
        << "\" x2=\"" << fmt(left + pw + 30) << "\" y2=\"" << fmt(ly)
        << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << fmt(left + pw + 35) << "\" y=\"" << fmt(ly + 4) << "\">"
        << escape(s.name) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace shfs
