#ifndef OFFAC_SVG_HPP
#define OFFAC_SVG_HPP

#include <string>
#include <vector>

namespace offac {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct ChartOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log2_x = false;
  int width = 640;
  int height = 420;
};

/// Self-contained SVG line chart with markers and a legend.
std::string line_chart_svg(const std::vector<Series>& series, const ChartOptions& options);
void write_line_chart(const std::string& path, const std::vector<Series>& series, const ChartOptions& options);

}  // namespace offac

#endif  // OFFAC_SVG_HPP
