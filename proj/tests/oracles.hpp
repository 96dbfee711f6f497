// Test-only reference implementations, kept independent of the library code
// paths they check.
#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "bipnet/geometry.hpp"
#include "bipnet/raster.hpp"

namespace oracle {

// Brute-force per-pixel scan with the library's point-side predicate; the
// scanline rasterizer must agree with this pixel for pixel.
inline bipnet::Raster rasterize_by_scan(const bipnet::Polygon& poly, int h, int w) {
  bipnet::Raster out(h, w, 0.0);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (bipnet::point_in_polygon({c + 0.5, r + 0.5}, poly)) out(r, c) = 1.0;
    }
  }
  return out;
}

inline long long count_fg(const bipnet::Raster& m) {
  long long n = 0;
  for (double v : m.data()) n += v >= 0.5;
  return n;
}

// Independent segment-pair intersection test (not the library's checker);
// true when any two non-adjacent edges properly cross.
inline bool has_self_intersection(const std::vector<bipnet::Point2>& v) {
  const std::size_t n = v.size();
  auto sgn = [](double x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); };
  auto crossed = [&](const bipnet::Point2& a, const bipnet::Point2& b, const bipnet::Point2& c,
                     const bipnet::Point2& d) {
    const int d1 = sgn(bipnet::cross(b - a, c - a));
    const int d2 = sgn(bipnet::cross(b - a, d - a));
    const int d3 = sgn(bipnet::cross(d - c, a - c));
    const int d4 = sgn(bipnet::cross(d - c, b - c));
    return d1 * d2 < 0 && d3 * d4 < 0;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i + 1; k < n; ++k) {
      if (k == i + 1 || (i == 0 && k == n - 1)) continue;
      if (crossed(v[i], v[(i + 1) % n], v[k], v[(k + 1) % n])) return true;
    }
  }
  return false;
}

// Star-shaped polygon around a center: simple by construction.
inline bipnet::Polygon random_star_polygon(std::mt19937& rng, double cx, double cy,
                                           double r_min, double r_max, int sides) {
  std::uniform_real_distribution<double> radius(r_min, r_max);
  std::vector<bipnet::Point2> pts;
  pts.reserve(sides);
  for (int i = 0; i < sides; ++i) {
    const double ang = 2.0 * M_PI * i / sides;
    const double r = radius(rng);
    pts.push_back({cx + r * std::cos(ang), cy + r * std::sin(ang)});
  }
  return bipnet::Polygon(std::move(pts));
}

inline bipnet::Polygon regular_ngon(double cx, double cy, double radius, int sides) {
  std::vector<bipnet::Point2> pts;
  pts.reserve(sides);
  for (int i = 0; i < sides; ++i) {
    const double ang = 2.0 * M_PI * i / sides;
    pts.push_back({cx + radius * std::cos(ang), cy + radius * std::sin(ang)});
  }
  return bipnet::Polygon(std::move(pts));
}

inline bipnet::Polygon rect_polygon(double x0, double y0, double x1, double y1) {
  return bipnet::Polygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

inline double percentile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const std::size_t rank = static_cast<std::size_t>(std::ceil(p / 100.0 * v.size()));
  return v[std::min(v.size() - 1, rank == 0 ? 0 : rank - 1)];
}

}  // namespace oracle
