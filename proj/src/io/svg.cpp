// Copyright 2026 The qpa-readout Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qpa/io/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "qpa/error.hpp"

namespace qpa::io {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 85, kRight = 150, kTop = 40, kBottom = 50;

std::string esc(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void fix() {
    if (!(lo <= hi)) lo = 0.0, hi = 1.0;
    if (lo == hi) lo -= 0.5, hi += 0.5;
  }
  double map(double v, double a, double b) const { return a + (v - lo) / (hi - lo) * (b - a); }
};

void open_svg(std::ostringstream& os, const PlotMeta& meta) {
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"11\" shape-rendering=\"crispEdges\">\n"
     << "<metadata>manifest-sha256:" << esc(meta.manifest_hash) << "</metadata>\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"13\">" << esc(meta.title)
     << "</text>\n";
}

void axes(std::ostringstream& os, const Range& xr, const Range& yr, const PlotMeta& meta) {
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  os << "<rect x=\"" << x0 << "\" y=\"" << y1 << "\" width=\"" << x1 - x0 << "\" height=\"" << y0 - y1
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = xr.lo + (xr.hi - xr.lo) * k / 4.0, fy = yr.lo + (yr.hi - yr.lo) * k / 4.0;
    const double px = xr.map(fx, x0, x1), py = yr.map(fy, y0, y1);
    os << "<text x=\"" << num(px) << "\" y=\"" << num(y0 + 15) << "\" text-anchor=\"middle\">" << tick(fx)
       << "</text>\n";
    os << "<text x=\"" << num(x0 - 5) << "\" y=\"" << num(py + 4) << "\" text-anchor=\"end\">" << tick(fy)
       << "</text>\n";
  }
  os << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"" << num(kHeight - 12) << "\" text-anchor=\"middle\">"
     << esc(meta.x_label) << "</text>\n";
  os << "<text transform=\"translate(14," << num((y0 + y1) / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
     << esc(meta.y_label) << "</text>\n";
}

// Piecewise-linear approximation of the viridis map.
std::string color(double t) {
  static const std::array<std::array<double, 3>, 5> stops = {{{68, 1, 84}, {59, 82, 139}, {33, 145, 140},
                                                              {94, 201, 98}, {253, 231, 37}}};
  t = std::clamp(t, 0.0, 1.0) * 4.0;
  const int k = std::min(3, static_cast<int>(t));
  const double f = t - k;
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                static_cast<int>(std::lround(stops[k][0] + f * (stops[k + 1][0] - stops[k][0]))),
                static_cast<int>(std::lround(stops[k][1] + f * (stops[k + 1][1] - stops[k][1]))),
                static_cast<int>(std::lround(stops[k][2] + f * (stops[k + 1][2] - stops[k][2]))));
  return buf;
}

}  // namespace

std::string line_plot(const std::vector<Series>& series, const PlotMeta& meta) {
  Range xr, yr;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw ValidationError("series x/y length mismatch");
    for (double v : s.x) xr.add(v);
    for (double v : s.y) yr.add(v);
  }
  xr.fix();
  yr.fix();
  std::ostringstream os;
  open_svg(os, meta);
  axes(os, xr, yr, meta);
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const std::string c = color(series.size() > 1 ? static_cast<double>(k) / static_cast<double>(series.size() - 1) : 0.0);
    os << "<polyline shape-rendering=\"geometricPrecision\" fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      os << num(xr.map(s.x[i], x0, x1)) << ',' << num(yr.map(s.y[i], y0, y1)) << ' ';
    }
    os << "\"/>\n";
    const double ly = kTop + 14.0 * static_cast<double>(k) + 8;
    os << "<line x1=\"" << x1 + 10 << "\" y1=\"" << ly << "\" x2=\"" << x1 + 30 << "\" y2=\"" << ly
       << "\" stroke=\"" << c << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << x1 + 35 << "\" y=\"" << ly + 4 << "\">" << esc(s.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string heatmap(const std::vector<double>& x, const std::vector<double>& y,
                    const std::vector<std::vector<double>>& z, const PlotMeta& meta, const std::string& z_label) {
  if (x.empty() || y.empty() || z.size() != y.size()) throw ValidationError("heatmap shape mismatch");
  Range xr, yr, zr;
  for (double v : x) xr.add(v);
  for (double v : y) yr.add(v);
  for (const auto& row : z) {
    if (row.size() != x.size()) throw ValidationError("heatmap shape mismatch");
    for (double v : row) zr.add(v);
  }
  xr.fix();
  yr.fix();
  zr.fix();
  std::ostringstream os;
  open_svg(os, meta);
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  const double cw = (x1 - x0) / static_cast<double>(x.size()), ch = (y0 - y1) / static_cast<double>(y.size());
  // Cells are drawn in index order; axis labels follow the grid range.
  for (std::size_t i = 0; i < y.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (!std::isfinite(z[i][j])) continue;
      os << "<rect x=\"" << num(x0 + cw * static_cast<double>(j)) << "\" y=\""
         << num(y0 - ch * static_cast<double>(i + 1)) << "\" width=\"" << num(cw + 0.2) << "\" height=\""
         << num(ch + 0.2) << "\" fill=\"" << color(zr.map(z[i][j], 0.0, 1.0)) << "\"/>\n";
    }
  }
  axes(os, xr, yr, meta);
  for (int k = 0; k < 20; ++k) {
    os << "<rect x=\"" << x1 + 15 << "\" y=\"" << num(y0 - (y0 - y1) * (k + 1) / 20.0) << "\" width=\"15\" height=\""
       << num((y0 - y1) / 20.0 + 0.5) << "\" fill=\"" << color((k + 0.5) / 20.0) << "\"/>\n";
  }
  os << "<text x=\"" << x1 + 35 << "\" y=\"" << num(y0) << "\">" << tick(zr.lo) << "</text>\n";
  os << "<text x=\"" << x1 + 35 << "\" y=\"" << num(y1 + 8) << "\">" << tick(zr.hi) << "</text>\n";
  os << "<text x=\"" << x1 + 10 << "\" y=\"" << num(y1 - 8) << "\">" << esc(z_label) << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace qpa::io
