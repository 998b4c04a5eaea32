#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <locale>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "mscan/bench.hpp"

namespace mscan {

namespace detail {

inline const char* method_color(Method m) {
  switch (m) {
    case Method::adaptive_las: return "#1b9e77";
    case Method::gss: return "#d95f02";
    case Method::spectral: return "#7570b3";
    case Method::gmg: return "#e7298a";
  }
  return "#000000";
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(4);
  os << v;
  return os.str();
}

// Linear ramp through a few viridis stops.
inline std::string level_color(double t) {
  static constexpr std::array<std::array<double, 3>, 5> stops{{{68, 1, 84},
                                                              {59, 82, 139},
                                                              {33, 145, 140},
                                                              {94, 201, 98},
                                                              {253, 231, 37}}};
  t = std::clamp(t, 0.0, 1.0) * (stops.size() - 1);
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(t), stops.size() - 2);
  const double f = t - static_cast<double>(k);
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                static_cast<int>(std::lround(stops[k][0] + f * (stops[k + 1][0] - stops[k][0]))),
                static_cast<int>(std::lround(stops[k][1] + f * (stops[k + 1][1] - stops[k][1]))),
                static_cast<int>(std::lround(stops[k][2] + f * (stops[k + 1][2] - stops[k][2]))));
  return buf;
}

}  // namespace detail

/// Mean err against theta multiplier, one panel per family, with min/max whiskers.
inline std::string error_curve_svg(const std::vector<ResultRow>& rows) {
  const auto points = summarize(rows);
  std::vector<Family> families;
  std::vector<Method> methods;
  double x_lo = 1e300, x_hi = -1e300, y_hi = 0.0;
  for (const auto& p : points) {
    if (std::find(families.begin(), families.end(), p.family) == families.end())
      families.push_back(p.family);
    if (std::find(methods.begin(), methods.end(), p.method) == methods.end())
      methods.push_back(p.method);
    x_lo = std::min(x_lo, p.theta_mult);
    x_hi = std::max(x_hi, p.theta_mult);
    y_hi = std::max(y_hi, p.max_err);
  }
  if (x_hi <= x_lo) x_hi = x_lo + 1.0;
  if (y_hi <= 0.0) y_hi = 1.0;

  const double pw = 420, ph = 260, ml = 50, mt = 30, gap = 40;
  const double width = ml + pw + 160, height = families.size() * (ph + mt + gap) + 20;
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  for (std::size_t f = 0; f < families.size(); ++f) {
    const double top = 20 + f * (ph + mt + gap);
    auto sx = [&](double x) { return ml + (x - x_lo) / (x_hi - x_lo) * pw; };
    auto sy = [&](double y) { return top + mt + ph - y / y_hi * ph; };
    os << "<text x=\"" << ml << "\" y=\"" << top + 15 << "\">" << to_string(families[f])
       << "</text>\n";
    os << "<rect x=\"" << ml << "\" y=\"" << top + mt << "\" width=\"" << pw << "\" height=\""
       << ph << "\" fill=\"none\" stroke=\"#444\"/>\n";
    os << "<text x=\"" << ml << "\" y=\"" << top + mt + ph + 15 << "\">" << detail::fmt(x_lo)
       << "</text><text x=\"" << ml + pw - 20 << "\" y=\"" << top + mt + ph + 15 << "\">"
       << detail::fmt(x_hi) << "</text>\n";
    os << "<text x=\"5\" y=\"" << top + mt + 10 << "\">" << detail::fmt(y_hi)
       << "</text><text x=\"5\" y=\"" << top + mt + ph << "\">0</text>\n";
    for (std::size_t k = 0; k < methods.size(); ++k) {
      const char* color = detail::method_color(methods[k]);
      os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (const auto& p : points) {
        if (p.family == families[f] && p.method == methods[k])
          os << detail::fmt(sx(p.theta_mult)) << ',' << detail::fmt(sy(p.mean_err)) << ' ';
      }
      os << "\"/>\n";
      for (const auto& p : points) {
        if (p.family != families[f] || p.method != methods[k]) continue;
        os << "<line x1=\"" << detail::fmt(sx(p.theta_mult)) << "\" x2=\""
           << detail::fmt(sx(p.theta_mult)) << "\" y1=\"" << detail::fmt(sy(p.min_err))
           << "\" y2=\"" << detail::fmt(sy(p.max_err)) << "\" stroke=\"" << color
           << "\" stroke-opacity=\"0.4\"/>\n";
      }
      os << "<text x=\"" << ml + pw + 15 << "\" y=\"" << top + mt + 20 + 18 * k << "\" fill=\""
         << color << "\">" << to_string(methods[k]) << "</text>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

/// Level plot of a landscape's display values; m runs down, n runs across.
inline std::string level_plot_svg(const Landscape& grid) {
  const std::vector<double> shown = grid.display();
  const double hi = *std::max_element(shown.begin(), shown.end());
  const double cell = std::max(2.0, std::min(6.0, 600.0 / std::max(grid.m_bar, grid.n_bar)));
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << grid.n_bar * cell + 40
     << "\" height=\"" << grid.m_bar * cell + 40 << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (Index m = 0; m < grid.m_bar; ++m) {
    for (Index n = 0; n < grid.n_bar; ++n) {
      const double t = hi > 0.0 ? shown[m * grid.n_bar + n] / hi : 0.0;
      os << "<rect x=\"" << 30 + n * cell << "\" y=\"" << 10 + m * cell << "\" width=\"" << cell
         << "\" height=\"" << cell << "\" fill=\"" << detail::level_color(t) << "\"/>\n";
    }
  }
  const auto [am, an] = grid.argmax();
  os << "<circle cx=\"" << 30 + (an - 0.5) * cell << "\" cy=\"" << 10 + (am - 0.5) * cell
     << "\" r=\"" << cell << "\" fill=\"none\" stroke=\"red\"/>\n";
  os << "<text x=\"30\" y=\"" << grid.m_bar * cell + 30 << "\">n (1.." << grid.n_bar
     << "), m (1.." << grid.m_bar << ") down; argmax (" << am << ", " << an << ")</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace mscan
