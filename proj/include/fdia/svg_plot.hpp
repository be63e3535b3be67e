#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace fdia {

struct PlotLine {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool dashed = false;
};

/// Static line chart. Non-finite y values break a line into pieces.
struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  int width = 960;
  int height = 360;
  std::vector<PlotLine> lines;
};

std::string render_svg(const LinePlot& plot);
void save_svg(const LinePlot& plot, const std::filesystem::path& path);

}  // namespace fdia
