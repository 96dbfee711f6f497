#pragma once

#include <cmath>
#include <vector>

#include "bipnet/errors.hpp"

namespace bipnet {

/// Intersection and on-boundary tolerance, in pixels.
inline constexpr double kGeomTol = 1e-9;

/// A sub-pixel 2-D point in image coordinates (+x right, +y down).
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2& a, const Point2& b) { return a.x == b.x && a.y == b.y; }
};

inline double dot(const Point2& a, const Point2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Point2& a, const Point2& b) { return a.x * b.y - a.y * b.x; }
inline Point2 operator-(const Point2& a, const Point2& b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator+(const Point2& a, const Point2& b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator*(double s, const Point2& p) { return {s * p.x, s * p.y}; }
inline double norm(const Point2& p) { return std::hypot(p.x, p.y); }

struct Bounds {
  double min_x, min_y, max_x, max_y;
};

/// An ordered simple polygon with at least 3 vertices and nonzero area.
///
/// Construction checks finiteness, vertex count, consecutive-duplicate
/// vertices and nonzero shoelace area. Simplicity is an invariant of the
/// operations that produce polygons, not re-verified on every construction;
/// is_simple_polygon() provides the brute-force check.
class Polygon {
 public:
  explicit Polygon(std::vector<Point2> vertices);

  const std::vector<Point2>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  const Point2& operator[](std::size_t i) const { return vertices_[i]; }

  Bounds bounds() const;

 private:
  std::vector<Point2> vertices_;
};

/// Absolute shoelace area, pixels^2.
double polygon_area(const Polygon& poly);

/// Signed shoelace area (orientation-dependent).
double polygon_signed_area(const Polygon& poly);

double polygon_perimeter(const Polygon& poly);

double distance_point_segment(const Point2& p, const Point2& a, const Point2& b);

/// Distance from p to the nearest point of the polygon boundary.
double distance_to_boundary(const Point2& p, const Polygon& poly);

/// Even-odd rule; points within kGeomTol of an edge count as inside.
bool point_in_polygon(const Point2& p, const Polygon& poly);

/// Smallest t > 0 such that origin + t*(cos angle, sin angle) lies on the
/// polygon boundary. The origin must be inside the polygon.
double ray_polygon_first_hit(const Point2& origin, double angle, const Polygon& poly);

/// Inward offset by distance d = area*(1 - ratio^2)/perimeter with miter
/// joins (miter limit 2d, beveled beyond). ratio in (0, 1]; ratio = 1 is the
/// identity. Throws DegenerateShrink when the offset annihilates the polygon
/// or the joined result stops being simple.
Polygon shrink_polygon(const Polygon& poly, double ratio);

/// Inward offset by an explicit distance; shrink_polygon computes d and
/// delegates here.
Polygon shrink_polygon_by_distance(const Polygon& poly, double distance);

/// shrink_polygon with the standard fallback: halve the offset distance on
/// DegenerateShrink, up to 8 halvings, then rethrow.
Polygon shrink_polygon_fallback(const Polygon& poly, double ratio);

/// O(n^2) segment-intersection simplicity test.
bool is_simple_polygon(const Polygon& poly);

}  // namespace bipnet
