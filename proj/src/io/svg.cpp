#include "qgvae/io/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "qgvae/common.hpp"

namespace qgvae::io {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void absorb(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!(lo < hi)) {
      lo -= 1.0;
      hi += 1.0;
    } else {
      const double m = 0.05 * (hi - lo);
      lo -= m;
      hi += m;
    }
  }
};

}  // namespace

void write_line_plot(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<LineSeries>& series) {
  const double width = 720, height = 480;
  const double ml = 70, mr = 20, mt = 40, mb = 55;
  Range rx, ry;
  for (const LineSeries& s : series) {
    if (s.x.size() != s.y.size())
      throw ShapeError("line series '" + s.label + "' has mismatched x/y");
    for (double v : s.x) rx.absorb(v);
    for (double v : s.y) ry.absorb(v);
  }
  if (!std::isfinite(rx.lo) || !std::isfinite(ry.lo))
    throw ShapeError("line plot has no finite data");
  rx.pad();
  ry.pad();
  auto sx = [&](double v) {
    return ml + (v - rx.lo) / (rx.hi - rx.lo) * (width - ml - mr);
  };
  auto sy = [&](double v) {
    return height - mb - (v - ry.lo) / (ry.hi - ry.lo) * (height - mt - mb);
  };

  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
     << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
     << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";
  // Axes and ticks.
  os << "<g stroke=\"black\" fill=\"none\">";
  os << "<path d=\"M" << ml << " " << mt << " V" << height - mb << " H"
     << width - mr << "\"/>";
  os << "</g>\n";
  os << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"black\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double fx = rx.lo + i * (rx.hi - rx.lo) / 5.0;
    const double fy = ry.lo + i * (ry.hi - ry.lo) / 5.0;
    os << "<line x1=\"" << num(sx(fx)) << "\" y1=\"" << height - mb
       << "\" x2=\"" << num(sx(fx)) << "\" y2=\"" << height - mb + 5
       << "\" stroke=\"black\"/>";
    os << "<text x=\"" << num(sx(fx)) << "\" y=\"" << height - mb + 18
       << "\" text-anchor=\"middle\">" << num(fx) << "</text>\n";
    os << "<line x1=\"" << ml - 5 << "\" y1=\"" << num(sy(fy)) << "\" x2=\""
       << ml << "\" y2=\"" << num(sy(fy)) << "\" stroke=\"black\"/>";
    os << "<text x=\"" << ml - 8 << "\" y=\"" << num(sy(fy) + 4)
       << "\" text-anchor=\"end\">" << num(fy) << "</text>\n";
  }
  os << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 12
     << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
  os << "<text x=\"16\" y=\"" << (mt + height - mb) / 2
     << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << (mt + height - mb) / 2 << ")\">" << y_label << "</text>\n";
  os << "</g>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const LineSeries& s = series[k];
    const char* color = kPalette[k % (sizeof(kPalette) / sizeof(*kPalette))];
    os << "<polyline fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      os << num(sx(s.x[i])) << "," << num(sy(s.y[i])) << " ";
    }
    os << "\"/>\n";
    os << "<g font-family=\"sans-serif\" font-size=\"12\">"
       << "<rect x=\"" << width - mr - 170 << "\" y=\"" << mt + 18 * k + 2
       << "\" width=\"12\" height=\"4\" fill=\"" << color << "\"/>"
       << "<text x=\"" << width - mr - 152 << "\" y=\"" << mt + 18 * k + 9
       << "\">" << s.label << "</text></g>\n";
  }
  os << "</svg>\n";
}

void write_heatmap(const std::string& path, const std::string& title,
                   const Eigen::ArrayXXd& field) {
  const int ny = static_cast<int>(field.rows());
  const int nx = static_cast<int>(field.cols());
  if (ny == 0 || nx == 0) throw ShapeError("heatmap of an empty field");
  const double cell = std::max(2.0, std::floor(640.0 / std::max(ny, nx)));
  const double ml = 20, mt = 40;
  const double width = ml + nx * cell + 20;
  const double height = mt + ny * cell + 20;
  double vmax = 0.0;
  for (int y = 0; y < ny; ++y)
    for (int x = 0; x < nx; ++x)
      if (std::isfinite(field(y, x))) vmax = std::max(vmax, std::abs(field(y, x)));
  if (vmax == 0.0) vmax = 1.0;

  auto shade = [&](double v) {
    double t = std::clamp(v / vmax, -1.0, 1.0);
    int r, g, b;
    if (t < 0) {
      // white -> blue
      r = static_cast<int>(255 + t * (255 - 38));
      g = static_cast<int>(255 + t * (255 - 68));
      b = static_cast<int>(255 + t * (255 - 160));
    } else {
      // white -> red
      r = static_cast<int>(255 - t * (255 - 178));
      g = static_cast<int>(255 - t * (255 - 24));
      b = static_cast<int>(255 - t * (255 - 43));
    }
    char buf[10];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return std::string(buf);
  };

  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
     << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
     << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        "font-family=\"sans-serif\" font-size=\"15\">" << title << "</text>\n";
  for (int y = 0; y < ny; ++y)
    for (int x = 0; x < nx; ++x)
      os << "<rect x=\"" << num(ml + x * cell) << "\" y=\"" << num(mt + y * cell)
         << "\" width=\"" << num(cell) << "\" height=\"" << num(cell)
         << "\" fill=\"" << shade(field(y, x)) << "\"/>\n";
  os << "</svg>\n";
}

}  // namespace qgvae::io
