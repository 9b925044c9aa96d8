#pragma once

#include <string>
#include <vector>

namespace shfs {

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  // Fixed y range when y_min < y_max; otherwise fitted to the data.
  double y_min = 0.0;
  double y_max = 0.0;
  int width = 640;
  int height = 400;
};

// Self-contained SVG line chart with markers. Output is a pure function of
// the inputs (fixed-precision formatting, no timestamps).
std::string render_line_chart(const PlotSpec& spec,
                              const std::vector<PlotSeries>& series);

}  // namespace shfs
