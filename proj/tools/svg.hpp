#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace geomech::cli {

struct PlotSpec {
  std::string title;
  std::string x_column;
  std::vector<std::string> y_columns;
  /// Plot y - y(0), divided by |y(0)| when that is nonzero; each series is
  /// scaled to its own maximum and the legend records the scale.
  bool drift = false;
  /// Log axes; rows with a non-positive coordinate are skipped.
  bool loglog = false;
};

/// Reads a headed CSV and writes an 800x500 SVG with one polyline per column.
void plot_csv(const std::filesystem::path& csv, const std::filesystem::path& svg, const PlotSpec& spec);

}  // namespace geomech::cli
