#pragma once

#include <string>
#include <vector>

namespace drsplit::svg {

struct Series {
  std::vector<double> x;
  std::vector<double> y;
};

// line plot; y is drawn on a log10 axis when every value is positive
std::string line_plot(const std::string& title, const std::string& x_label,
                      const std::string& y_label, const Series& series);

struct HeatCell {
  double x = 0.0;
  double y = 0.0;
  double value = 0.0;
};

struct HeatPanel {
  std::string title;
  std::vector<HeatCell> cells;
};

// side-by-side heatmaps over a shared (x, y) lattice with cell width `cell`
std::string heatmaps(const std::string& title, const std::string& x_label,
                     const std::string& y_label, double cell,
                     const std::vector<HeatPanel>& panels);

}  // namespace drsplit::svg
