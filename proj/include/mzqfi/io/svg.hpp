#pragma once

// Minimal standalone SVG output: colored cell heatmaps and iso-line contour
// plots of a scalar field on a rectangular grid. Output depends only on the
// input values, so identical inputs give identical bytes.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "mzqfi/errors.hpp"
#include "mzqfi/grid.hpp"

namespace mzqfi::io {

// values(r, c) sits at (xs[c], ys[r]); NaN cells are drawn gray.
struct ScalarField {
  std::vector<double> xs;
  std::vector<double> ys;
  Grid2D<double> values;
  std::string x_label = "x";
  std::string y_label = "y";
  std::string value_label = "value";
  std::string title;

  void validate() const {
    if (xs.empty() || ys.empty()) throw SchemaError("svg: empty field");
    if (values.rows() != ys.size() || values.cols() != xs.size())
      throw SchemaError("svg: value grid does not match axes");
  }
};

namespace detail {

inline std::string fmt(double v, const char* f = "%.2f") {
  char buf[48];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Perceptually ordered dark-blue to yellow ramp.
inline std::string color(double t) {
  static constexpr std::array<std::array<double, 3>, 5> stops{{{68, 1, 84},
                                                                {59, 82, 139},
                                                                {33, 145, 140},
                                                                {94, 201, 98},
                                                                {253, 231, 37}}};
  if (std::isnan(t)) return "#999999";
  t = std::clamp(t, 0.0, 1.0) * (stops.size() - 1);
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(t), stops.size() - 2);
  const double f = t - static_cast<double>(i);
  char buf[8];
  int rgb[3];
  for (int k = 0; k < 3; ++k)
    rgb[k] = static_cast<int>(std::lround(stops[i][k] + f * (stops[i + 1][k] - stops[i][k])));
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
  return buf;
}

struct Frame {
  double left = 70, top = 40, width = 480, height = 400, bar = 20;
  double total_w() const { return left + width + 40 + bar + 70; }
  double total_h() const { return top + height + 60; }
};

inline std::pair<double, double> value_range(const ScalarField& f) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : f.values)
    if (std::isfinite(v)) lo = std::min(lo, v), hi = std::max(hi, v);
  if (!std::isfinite(lo)) return {0.0, 1.0};
  if (hi == lo) hi = lo + 1.0;
  return {lo, hi};
}

inline void open_document(std::ostringstream& os, const ScalarField& f, const Frame& fr) {
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(fr.total_w(), "%.0f")
     << "\" height=\"" << fmt(fr.total_h(), "%.0f") << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!f.title.empty())
    os << "<text x=\"" << fmt(fr.left + fr.width / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
       << f.title << "</text>\n";
}

inline void axes(std::ostringstream& os, const ScalarField& f, const Frame& fr) {
  const double x0 = fr.left, y0 = fr.top + fr.height;
  os << "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n"
     << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(y0) << "\" x2=\"" << fmt(x0 + fr.width) << "\" y2=\"" << fmt(y0) << "\"/>\n"
     << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(fr.top) << "\" x2=\"" << fmt(x0) << "\" y2=\"" << fmt(y0) << "\"/>\n"
     << "</g>\n";
  const auto xlo = f.xs.front(), xhi = f.xs.back(), ylo = f.ys.front(), yhi = f.ys.back();
  os << "<g class=\"ticks\">\n"
     << "<text x=\"" << fmt(x0) << "\" y=\"" << fmt(y0 + 16) << "\" text-anchor=\"middle\">" << fmt(xlo, "%.3g") << "</text>\n"
     << "<text x=\"" << fmt(x0 + fr.width) << "\" y=\"" << fmt(y0 + 16) << "\" text-anchor=\"middle\">" << fmt(xhi, "%.3g") << "</text>\n"
     << "<text x=\"" << fmt(x0 - 6) << "\" y=\"" << fmt(y0) << "\" text-anchor=\"end\">" << fmt(ylo, "%.3g") << "</text>\n"
     << "<text x=\"" << fmt(x0 - 6) << "\" y=\"" << fmt(fr.top + 10) << "\" text-anchor=\"end\">" << fmt(yhi, "%.3g") << "</text>\n"
     << "</g>\n"
     << "<text x=\"" << fmt(x0 + fr.width / 2) << "\" y=\"" << fmt(y0 + 36) << "\" text-anchor=\"middle\">" << f.x_label << "</text>\n"
     << "<text x=\"" << fmt(x0 - 44) << "\" y=\"" << fmt(fr.top + fr.height / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 "
     << fmt(x0 - 44) << " " << fmt(fr.top + fr.height / 2) << ")\">" << f.y_label << "</text>\n";
}

inline void color_bar(std::ostringstream& os, const ScalarField& f, const Frame& fr, double lo, double hi) {
  const double bx = fr.left + fr.width + 40;
  const int steps = 32;
  os << "<g class=\"colorbar\">\n";
  for (int k = 0; k < steps; ++k) {
    const double h = fr.height / steps;
    os << "<rect x=\"" << fmt(bx) << "\" y=\"" << fmt(fr.top + fr.height - (k + 1) * h) << "\" width=\""
       << fmt(fr.bar) << "\" height=\"" << fmt(h + 0.5) << "\" fill=\"" << color((k + 0.5) / steps) << "\"/>\n";
  }
  os << "<text x=\"" << fmt(bx + fr.bar + 4) << "\" y=\"" << fmt(fr.top + fr.height) << "\">" << fmt(lo, "%.4g") << "</text>\n"
     << "<text x=\"" << fmt(bx + fr.bar + 4) << "\" y=\"" << fmt(fr.top + 10) << "\">" << fmt(hi, "%.4g") << "</text>\n"
     << "<text x=\"" << fmt(bx) << "\" y=\"" << fmt(fr.top - 8) << "\">" << f.value_label << "</text>\n"
     << "</g>\n";
}

// Cell edges halfway between neighbouring axis values.
inline std::vector<double> edges(const std::vector<double>& v) {
  std::vector<double> e(v.size() + 1);
  if (v.size() == 1) return {v[0] - 0.5, v[0] + 0.5};
  for (std::size_t i = 1; i < v.size(); ++i) e[i] = 0.5 * (v[i - 1] + v[i]);
  e.front() = v.front() - (e[1] - v.front());
  e.back() = v.back() + (v.back() - e[v.size() - 1]);
  return e;
}

}  // namespace detail

// One <rect class="cell"> per grid value.
inline std::string render_heatmap_svg(const ScalarField& f) {
  f.validate();
  detail::Frame fr;
  const auto [lo, hi] = detail::value_range(f);
  const auto ex = detail::edges(f.xs), ey = detail::edges(f.ys);
  const double sx = fr.width / (ex.back() - ex.front()), sy = fr.height / (ey.back() - ey.front());
  std::ostringstream os;
  detail::open_document(os, f, fr);
  os << "<g class=\"cells\" shape-rendering=\"crispEdges\">\n";
  for (std::size_t r = 0; r < f.ys.size(); ++r) {
    for (std::size_t c = 0; c < f.xs.size(); ++c) {
      const double v = f.values(r, c);
      const double x = fr.left + (ex[c] - ex.front()) * sx;
      const double y = fr.top + fr.height - (ey[r + 1] - ey.front()) * sy;
      os << "<rect class=\"cell\" x=\"" << detail::fmt(x) << "\" y=\"" << detail::fmt(y) << "\" width=\""
         << detail::fmt((ex[c + 1] - ex[c]) * sx) << "\" height=\"" << detail::fmt((ey[r + 1] - ey[r]) * sy)
         << "\" fill=\"" << detail::color(std::isfinite(v) ? (v - lo) / (hi - lo) : std::nan("")) << "\"/>\n";
    }
  }
  os << "</g>\n";
  detail::axes(os, f, fr);
  detail::color_bar(os, f, fr, lo, hi);
  os << "</svg>\n";
  return os.str();
}

// Iso-lines at `levels` evenly spaced values (marching squares, saddles
// resolved by the cell-centre average).
inline std::string render_contour_svg(const ScalarField& f, int levels = 10) {
  f.validate();
  mzqfi::detail::require(levels >= 1, "contour levels must be >= 1");
  if (f.xs.size() < 2 || f.ys.size() < 2) throw SchemaError("svg: contour needs at least a 2x2 grid");
  detail::Frame fr;
  const auto [lo, hi] = detail::value_range(f);
  const double sx = fr.width / (f.xs.back() - f.xs.front());
  const double sy = fr.height / (f.ys.back() - f.ys.front());
  auto px = [&](double x) { return fr.left + (x - f.xs.front()) * sx; };
  auto py = [&](double y) { return fr.top + fr.height - (y - f.ys.front()) * sy; };
  std::ostringstream os;
  detail::open_document(os, f, fr);
  os << "<rect x=\"" << detail::fmt(fr.left) << "\" y=\"" << detail::fmt(fr.top) << "\" width=\""
     << detail::fmt(fr.width) << "\" height=\"" << detail::fmt(fr.height) << "\" fill=\"#f4f4f4\"/>\n";
  os << "<g class=\"contours\" fill=\"none\" stroke-width=\"1.5\">\n";
  for (int l = 0; l < levels; ++l) {
    const double t = (l + 0.5) / levels;
    const double level = lo + t * (hi - lo);
    std::string d;
    for (std::size_t r = 0; r + 1 < f.ys.size(); ++r) {
      for (std::size_t c = 0; c + 1 < f.xs.size(); ++c) {
        // Corners counter-clockwise from bottom-left.
        const std::array<double, 4> v{f.values(r, c), f.values(r, c + 1), f.values(r + 1, c + 1), f.values(r + 1, c)};
        if (!std::all_of(v.begin(), v.end(), [](double a) { return std::isfinite(a); })) continue;
        const std::array<double, 4> cx{f.xs[c], f.xs[c + 1], f.xs[c + 1], f.xs[c]};
        const std::array<double, 4> cy{f.ys[r], f.ys[r], f.ys[r + 1], f.ys[r + 1]};
        int mask = 0;
        for (int k = 0; k < 4; ++k) mask |= (v[static_cast<std::size_t>(k)] >= level ? 1 : 0) << k;
        if (mask == 0 || mask == 15) continue;
        auto cross = [&](int e) {
          const auto a = static_cast<std::size_t>(e), b = static_cast<std::size_t>((e + 1) % 4);
          const double w = (level - v[a]) / (v[b] - v[a]);
          return std::array<double, 2>{px(cx[a] + w * (cx[b] - cx[a])), py(cy[a] + w * (cy[b] - cy[a]))};
        };
        std::vector<int> es;
        for (int e = 0; e < 4; ++e) {
          const bool ia = (mask >> e) & 1, ib = (mask >> ((e + 1) % 4)) & 1;
          if (ia != ib) es.push_back(e);
        }
        std::vector<std::array<int, 2>> segs;
        if (es.size() == 2) {
          segs.push_back({es[0], es[1]});
        } else {
          // Saddle: corners 0 and 2 share a side of the level.
          const bool centre_high = (v[0] + v[1] + v[2] + v[3]) / 4.0 >= level;
          const bool c0_high = mask & 1;
          if (centre_high == c0_high) segs = {{0, 1}, {2, 3}};
          else segs = {{3, 0}, {1, 2}};
        }
        for (const auto& s : segs) {
          const auto a = cross(s[0]), b = cross(s[1]);
          d += "M" + detail::fmt(a[0]) + " " + detail::fmt(a[1]) + "L" + detail::fmt(b[0]) + " " + detail::fmt(b[1]);
        }
      }
    }
    if (!d.empty())
      os << "<path class=\"contour\" data-level=\"" << detail::fmt(level, "%.6g") << "\" stroke=\""
         << detail::color(t) << "\" d=\"" << d << "\"/>\n";
  }
  os << "</g>\n";
  detail::axes(os, f, fr);
  detail::color_bar(os, f, fr, lo, hi);
  os << "</svg>\n";
  return os.str();
}

}  // namespace mzqfi::io
