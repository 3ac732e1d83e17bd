#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace spherebot {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool dashed = false;
};

struct Panel {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  bool equal_aspect = false;
};

/// Panels stacked vertically in one standalone SVG file.
void write_svg(const std::vector<Panel>& panels, const std::filesystem::path& path);

/// Whitespace-separated columns with a commented header, for gnuplot.
void write_dat(const std::vector<std::string>& names, const std::vector<std::vector<double>>& columns,
               const std::filesystem::path& path);

}  // namespace spherebot
