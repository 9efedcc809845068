#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace qgvae::io {

struct LineSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

// Self-contained SVG line chart with axes, ticks, and a legend.
void write_line_plot(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<LineSeries>& series);

// Diverging blue-white-red heatmap of a (ny, nx) field, symmetric about 0.
void write_heatmap(const std::string& path, const std::string& title,
                   const Eigen::ArrayXXd& field);

}  // namespace qgvae::io
