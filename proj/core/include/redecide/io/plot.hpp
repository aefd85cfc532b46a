#pragma once

#include <string>
#include <utility>
#include <vector>

namespace redecide {

struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;  // sorted by x by the caller
};

// Standalone SVG line chart; a pure function of its inputs.
std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label,
                           const std::vector<PlotSeries>& series);

}  // namespace redecide
