#include "bipnet/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bipnet {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidPolygon: return "InvalidPolygon";
    case ErrorCode::OriginOutside: return "OriginOutside";
    case ErrorCode::NoIntersection: return "NoIntersection";
    case ErrorCode::DegenerateShrink: return "DegenerateShrink";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::TooNarrow: return "TooNarrow";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::CoincidentCenters: return "CoincidentCenters";
    case ErrorCode::DegeneratePoints: return "DegeneratePoints";
    case ErrorCode::EmptyUnion: return "EmptyUnion";
    case ErrorCode::NonPositiveDistance: return "NonPositiveDistance";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::BadVersion: return "BadVersion";
    case ErrorCode::Truncated: return "Truncated";
    case ErrorCode::Oversize: return "Oversize";
    case ErrorCode::CannotPlace: return "CannotPlace";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "UnknownError";
}

namespace {

double signed_area_of(const std::vector<Point2>& v) {
  double acc = 0.0;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    acc += v[j].x * v[i].y - v[i].x * v[j].y;
  }
  return 0.5 * acc;
}

}  // namespace

Polygon::Polygon(std::vector<Point2> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 3) {
    throw Error(ErrorCode::InvalidPolygon, "polygon needs at least 3 vertices");
  }
  for (const auto& p : vertices_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorCode::InvalidPolygon, "non-finite vertex");
    }
  }
  for (std::size_t i = 0, j = vertices_.size() - 1; i < vertices_.size(); j = i++) {
    if (norm(vertices_[i] - vertices_[j]) < kGeomTol) {
      throw Error(ErrorCode::InvalidPolygon, "consecutive duplicate vertices");
    }
  }
  if (std::abs(signed_area_of(vertices_)) <= 1e-12) {
    throw Error(ErrorCode::InvalidPolygon, "zero-area polygon");
  }
}

Bounds Polygon::bounds() const {
  Bounds b{vertices_[0].x, vertices_[0].y, vertices_[0].x, vertices_[0].y};
  for (const auto& p : vertices_) {
    b.min_x = std::min(b.min_x, p.x);
    b.min_y = std::min(b.min_y, p.y);
    b.max_x = std::max(b.max_x, p.x);
    b.max_y = std::max(b.max_y, p.y);
  }
  return b;
}

double polygon_signed_area(const Polygon& poly) { return signed_area_of(poly.vertices()); }

double polygon_area(const Polygon& poly) { return std::abs(polygon_signed_area(poly)); }

double polygon_perimeter(const Polygon& poly) {
  const auto& v = poly.vertices();
  double acc = 0.0;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    acc += norm(v[i] - v[j]);
  }
  return acc;
}

double distance_point_segment(const Point2& p, const Point2& a, const Point2& b) {
  const Point2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 <= 0.0) return norm(p - a);
  double t = dot(p - a, ab) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

double distance_to_boundary(const Point2& p, const Polygon& poly) {
  const auto& v = poly.vertices();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    best = std::min(best, distance_point_segment(p, v[j], v[i]));
  }
  return best;
}

bool point_in_polygon(const Point2& p, const Polygon& poly) {
  if (distance_to_boundary(p, poly) <= kGeomTol) return true;
  const auto& v = poly.vertices();
  bool inside = false;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    if ((v[i].y > p.y) != (v[j].y > p.y)) {
      const double x_cross = (v[j].x - v[i].x) * (p.y - v[i].y) / (v[j].y - v[i].y) + v[i].x;
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

double ray_polygon_first_hit(const Point2& origin, double angle, const Polygon& poly) {
  if (!point_in_polygon(origin, poly)) {
    throw Error(ErrorCode::OriginOutside, "ray origin outside polygon");
  }
  const Point2 dir{std::cos(angle), std::sin(angle)};
  const auto& v = poly.vertices();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    const Point2& a = v[j];
    const Point2& b = v[i];
    const Point2 edge = b - a;
    const Point2 w = a - origin;
    const double denom = cross(dir, edge);
    if (std::abs(denom) > 1e-12) {
      const double t = cross(w, edge) / denom;
      const double s = cross(w, dir) / denom;
      if (t > kGeomTol && s >= -kGeomTol && s <= 1.0 + kGeomTol) {
        best = std::min(best, t);
      }
    } else if (std::abs(cross(w, dir)) <= kGeomTol * std::max(1.0, norm(edge))) {
      // Ray collinear with the edge: endpoints are the candidate hits.
      for (const Point2* e : {&a, &b}) {
        const double t = dot(*e - origin, dir);
        if (t > kGeomTol) best = std::min(best, t);
      }
    }
  }
  if (!std::isfinite(best)) {
    throw Error(ErrorCode::NoIntersection, "interior ray found no boundary hit");
  }
  return best;
}

bool is_simple_polygon(const Polygon& poly) {
  const auto& v = poly.vertices();
  const std::size_t n = v.size();
  auto proper_cross = [](const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
    const double d1 = cross(b - a, c - a);
    const double d2 = cross(b - a, d - a);
    const double d3 = cross(d - c, a - c);
    const double d4 = cross(d - c, b - c);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
  };
  auto on_segment = [](const Point2& a, const Point2& b, const Point2& p) {
    return std::abs(cross(b - a, p - a)) <= 1e-9 * std::max(1.0, norm(b - a)) &&
           dot(p - a, b - a) > 1e-12 && dot(p - b, a - b) > 1e-12;
  };
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = v[i];
    const Point2& b = v[(i + 1) % n];
    for (std::size_t k = i + 1; k < n; ++k) {
      const Point2& c = v[k];
      const Point2& d = v[(k + 1) % n];
      const bool adjacent = (k == i + 1) || (i == 0 && k == n - 1);
      if (adjacent) continue;
      if (proper_cross(a, b, c, d)) return false;
      if (on_segment(a, b, c) || on_segment(a, b, d) || on_segment(c, d, a) ||
          on_segment(c, d, b)) {
        return false;
      }
    }
  }
  return true;
}

namespace {

Polygon offset_inward(const Polygon& poly, double d) {
  const auto& v = poly.vertices();
  const std::size_t n = v.size();
  const double orient = polygon_signed_area(poly) > 0 ? 1.0 : -1.0;

  std::vector<Point2> tangents(n), normals(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 t = v[(i + 1) % n] - v[i];
    const double len = norm(t);
    tangents[i] = {t.x / len, t.y / len};
    normals[i] = {-orient * tangents[i].y, orient * tangents[i].x};
  }

  const double miter_limit = 2.0 * d;
  std::vector<Point2> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t prev = (i + n - 1) % n;
    const Point2 p1 = v[i] + d * normals[prev];  // end of displaced previous edge
    const Point2 p2 = v[i] + d * normals[i];     // start of displaced current edge
    const double denom = cross(tangents[prev], tangents[i]);
    if (std::abs(denom) < 1e-12) {
      out.push_back(p2);
      continue;
    }
    // Intersection of the two displaced edge lines; it lies on the corner's
    // angle bisector, so past the limit the join is capped along it, which
    // keeps the vertex inside the wedge.
    const double t = cross(p2 - p1, tangents[i]) / denom;
    const Point2 miter = p1 + t * tangents[prev];
    const double miter_len = norm(miter - v[i]);
    if (miter_len > miter_limit) {
      out.push_back(v[i] + (miter_limit / miter_len) * (miter - v[i]));
    } else {
      out.push_back(miter);
    }
  }

  // Drop near-duplicate consecutive points left by bevels at gentle corners.
  std::vector<Point2> cleaned;
  cleaned.reserve(out.size());
  for (const auto& p : out) {
    if (cleaned.empty() || norm(p - cleaned.back()) > kGeomTol) cleaned.push_back(p);
  }
  while (cleaned.size() >= 2 && norm(cleaned.front() - cleaned.back()) <= kGeomTol) {
    cleaned.pop_back();
  }
  if (cleaned.size() < 3) {
    throw Error(ErrorCode::DegenerateShrink, "offset collapsed the polygon");
  }
  Polygon result(std::move(cleaned));

  const double in_area = polygon_area(poly);
  const double out_area = polygon_area(result);
  const bool same_orient = (polygon_signed_area(result) > 0) == (polygon_signed_area(poly) > 0);
  if (out_area >= in_area || !same_orient) {
    throw Error(ErrorCode::DegenerateShrink, "offset did not shrink the polygon");
  }
  for (const auto& p : result.vertices()) {
    if (!point_in_polygon(p, poly)) {
      throw Error(ErrorCode::DegenerateShrink, "offset vertex escaped the polygon");
    }
  }
  if (!is_simple_polygon(result)) {
    throw Error(ErrorCode::DegenerateShrink, "offset result self-intersects");
  }
  return result;
}

}  // namespace

Polygon shrink_polygon_by_distance(const Polygon& poly, double distance) {
  if (!(distance >= 0.0) || !std::isfinite(distance)) {
    throw Error(ErrorCode::InvalidArgument, "shrink distance must be nonnegative");
  }
  if (distance == 0.0) return poly;
  return offset_inward(poly, distance);
}

namespace {

double shrink_distance(const Polygon& poly, double ratio) {
  if (!(ratio > 0.0) || !(ratio <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "shrink ratio must lie in (0, 1]");
  }
  return polygon_area(poly) * (1.0 - ratio * ratio) / polygon_perimeter(poly);
}

}  // namespace

Polygon shrink_polygon(const Polygon& poly, double ratio) {
  return shrink_polygon_by_distance(poly, shrink_distance(poly, ratio));
}

Polygon shrink_polygon_fallback(const Polygon& poly, double ratio) {
  double d = shrink_distance(poly, ratio);
  for (int attempt = 0; attempt <= 8; ++attempt) {
    try {
      return shrink_polygon_by_distance(poly, d);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateShrink) throw;
      d *= 0.5;
    }
  }
  throw Error(ErrorCode::DegenerateShrink, "shrink failed after 8 halvings");
}

}  // namespace bipnet
