#include "redecide/io/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "redecide/errors.hpp"

namespace redecide {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                          "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label,
                           const std::vector<PlotSeries>& series) {
  if (series.empty()) throw ArgumentError("svg_line_chart: no series");
  const double width = 640, height = 420;
  const double left = 70, right = 150, top = 50, bottom = 55;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (!(xmin <= xmax)) throw ArgumentError("svg_line_chart: no points");
  if (xmax == xmin) {
    xmax += 1.0;
    xmin -= 1.0;
  }
  const double ypad = (ymax - ymin) * 0.08 + 1e-9;
  ymin -= ypad;
  ymax += ypad;

  auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * plot_w; };
  auto sy = [&](double y) { return top + (ymax - y) / (ymax - ymin) * plot_h; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) +
         "\" height=\"" + num(height) + "\" viewBox=\"0 0 " + num(width) + " " +
         num(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(width / 2) + "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"15\">" + title + "</text>\n";

  // axes
  svg += "<line x1=\"" + num(left) + "\" y1=\"" + num(top + plot_h) + "\" x2=\"" +
         num(left + plot_w) + "\" y2=\"" + num(top + plot_h) +
         "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + num(left) + "\" y1=\"" + num(top) + "\" x2=\"" +
         num(left) + "\" y2=\"" + num(top + plot_h) + "\" stroke=\"black\"/>\n";

  for (int i = 0; i <= 4; ++i) {
    const double fx = xmin + (xmax - xmin) * i / 4.0;
    const double fy = ymin + (ymax - ymin) * i / 4.0;
    svg += "<line x1=\"" + num(sx(fx)) + "\" y1=\"" + num(top + plot_h) +
           "\" x2=\"" + num(sx(fx)) + "\" y2=\"" + num(top + plot_h + 5) +
           "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + num(sx(fx)) + "\" y=\"" + num(top + plot_h + 20) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">" + num(fx) + "</text>\n";
    svg += "<line x1=\"" + num(left - 5) + "\" y1=\"" + num(sy(fy)) + "\" x2=\"" +
           num(left) + "\" y2=\"" + num(sy(fy)) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + num(left - 9) + "\" y=\"" + num(sy(fy) + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
           num(fy) + "</text>\n";
  }
  svg += "<text x=\"" + num(left + plot_w / 2) + "\" y=\"" + num(height - 12) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
         x_label + "</text>\n";
  svg += "<text x=\"18\" y=\"" + num(top + plot_h / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
         "transform=\"rotate(-90 18 " + num(top + plot_h / 2) + ")\">" +
         y_label + "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % 6];
    std::string points;
    for (const auto& [x, y] : series[s].points) {
      points += num(sx(x)) + "," + num(sy(y)) + " ";
    }
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"2\" points=\"" + points + "\"/>\n";
    for (const auto& [x, y] : series[s].points) {
      svg += "<circle cx=\"" + num(sx(x)) + "\" cy=\"" + num(sy(y)) +
             "\" r=\"3\" fill=\"" + color + "\"/>\n";
    }
    const double ly = top + 16 + 18 * static_cast<double>(s);
    svg += "<line x1=\"" + num(left + plot_w + 12) + "\" y1=\"" + num(ly - 4) +
           "\" x2=\"" + num(left + plot_w + 34) + "\" y2=\"" + num(ly - 4) +
           "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + num(left + plot_w + 40) + "\" y=\"" + num(ly) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" + series[s].label +
           "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace redecide
