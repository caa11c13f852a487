#pragma once

// Minimal standalone SVG plots: log-log series, trace polylines and circle
// families. No numeric logic beyond the axis mapping.

#include <string>
#include <vector>

namespace slelab::plot {

enum class PlotKind { LogLog, Trace, Circles };

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct CircleShape {
  double cx, cy, r;
  int group = 0;  // colour index
};

struct PlotSpec {
  PlotKind kind = PlotKind::LogLog;
  std::vector<Series> series;        // LogLog: one polyline + markers each; Trace: first series
  std::vector<CircleShape> circles;  // Circles
  std::vector<std::pair<double, double>> markers;  // Circles: marked points
  std::string title;
  std::string x_label = "x";
  std::string y_label = "y";
  std::string output_path;
};

/// Standalone SVG 1.1 document.
std::string render_svg(const PlotSpec& spec);

/// Writes render_svg(spec) to spec.output_path; throws std::runtime_error.
void write_svg(const PlotSpec& spec);

}  // namespace slelab::plot
