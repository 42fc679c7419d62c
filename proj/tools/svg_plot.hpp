#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace quest::tools {

struct ScatterSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

struct BarGroup {
  std::string label;
  std::vector<double> values;  // one per series
};

/// Static SVG renderings for the report command. Axes are linear unless
/// `log_y` is set.
void write_scatter_svg(const std::filesystem::path& path, const std::string& title,
                       const std::string& x_label, const std::string& y_label,
                       const std::vector<ScatterSeries>& series);

void write_bar_svg(const std::filesystem::path& path, const std::string& title,
                   const std::string& y_label, const std::vector<std::string>& series_names,
                   const std::vector<BarGroup>& groups, bool log_y);

}  // namespace quest::tools
