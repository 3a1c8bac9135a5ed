#ifndef MISSVAR_SVG_PLOT_HPP
#define MISSVAR_SVG_PLOT_HPP

#include <filesystem>
#include <string>
#include <vector>

namespace missvar::plot {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool logx = false;
  bool logy = false;
  std::vector<Series> series;
  std::vector<std::string> annotations;   // drawn under the title
};

// Static line plot as a standalone SVG; points with non-finite or (on log
// axes) non-positive coordinates are dropped silently.
void write_svg(const std::filesystem::path& path, const PlotSpec& spec);

}  // namespace missvar::plot

#endif
