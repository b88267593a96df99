#pragma once

#include <string>
#include <utility>
#include <vector>

namespace ceglab::svg {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
  bool markers = false; // draw points instead of a polyline
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = true;
  bool log_y = false;
  std::vector<Series> series;
};

// Layers are stacked in order; positive values stack upward from zero and
// negative values downward, so the top edge minus the bottom edge of the
// positive stack plus the negative stack equals the row total.
struct StackedAreaChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<double> x;
  std::vector<std::pair<std::string, std::vector<double>>> layers;
  bool total_line = true;
};

struct BarChart {
  std::string title;
  std::string y_label;
  std::vector<std::pair<std::string, double>> bars;
  bool log_y = false;
};

std::string render(const LineChart &chart);
std::string render(const StackedAreaChart &chart);
std::string render(const BarChart &chart);

/// Escapes &, <, >, " and ' for use in SVG text and attribute values.
std::string escape(const std::string &text);

} // namespace ceglab::svg
