#include "bipnet/decoder.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace bipnet {

void PredictionMaps::validate() const {
  if (shrink_prob.empty()) {
    throw Error(ErrorCode::DimensionMismatch, "prediction maps have no shrink channel");
  }
  for (const Raster& d : distance_maps) {
    if (!d.same_shape(shrink_prob)) {
      throw Error(ErrorCode::DimensionMismatch, "distance map shape differs from shrink map");
    }
  }
}

PredictionMaps to_prediction_maps(GtMaps maps) {
  PredictionMaps out;
  out.shrink_prob = std::move(maps.shrink_mask);
  out.distance_maps = std::move(maps.distance_maps);
  out.validate();
  return out;
}

std::vector<Raster> binarize_components(const Raster& shrink_prob, double threshold,
                                        int min_area) {
  if (!(threshold > 0.0) || !(threshold < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "threshold must lie in (0, 1)");
  }
  if (min_area < 1) throw Error(ErrorCode::InvalidArgument, "min_area must be >= 1");

  const LabeledMask lm = label_components(shrink_prob, threshold);
  std::vector<Raster> out;
  for (std::size_t ci = 0; ci < lm.components.size(); ++ci) {
    if (lm.components[ci].pixel_count < min_area) continue;
    Raster mask(lm.height, lm.width, 0.0);
    const ComponentStats& s = lm.components[ci];
    for (int r = s.min_r; r <= s.max_r; ++r) {
      for (int c = s.min_c; c <= s.max_c; ++c) {
        if (lm.label_at(r, c) == static_cast<int32_t>(ci)) mask(r, c) = 1.0;
      }
    }
    out.push_back(std::move(mask));
  }
  return out;
}

RayCluster read_cluster(const Point2& center, const std::vector<Raster>& distance_maps,
                        ReadMode mode) {
  if (distance_maps.empty()) {
    throw Error(ErrorCode::InvalidArgument, "no distance maps to read");
  }
  const int h = distance_maps[0].height();
  const int w = distance_maps[0].width();
  const int c = static_cast<int>(std::floor(center.x));
  const int r = static_cast<int>(std::floor(center.y));
  if (r < 0 || r >= h || c < 0 || c >= w) {
    throw Error(ErrorCode::OutOfBounds, "cluster center outside the map bounds");
  }

  RayCluster cluster;
  cluster.center = center;
  cluster.distances.resize(distance_maps.size());
  for (std::size_t i = 0; i < distance_maps.size(); ++i) {
    double v;
    if (mode == ReadMode::Nearest) {
      v = distance_maps[i](r, c);
    } else {
      double sum = 0.0;
      int count = 0;
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          const int rr = r + dr, cc = c + dc;
          if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
          sum += distance_maps[i](rr, cc);
          ++count;
        }
      }
      v = sum / count;
    }
    cluster.distances[i] = std::max(v, 0.5);
  }
  return cluster;
}

Polygon piecewise_contour(const RayCluster& cluster) {
  std::vector<Point2> pts;
  pts.reserve(cluster.ray_count());
  for (int i = 0; i < cluster.ray_count(); ++i) pts.push_back(cluster.endpoint(i));
  return Polygon(std::move(pts));
}

std::vector<Point2> select_interval_points(const RayCluster& a, const RayCluster& b) {
  const Point2 d = b.center - a.center;
  const double len = norm(d);
  if (len < 1e-6) {
    throw Error(ErrorCode::CoincidentCenters, "adjacent cluster centers coincide");
  }
  const Point2 u{d.x / len, d.y / len};

  std::vector<Point2> selected;
  auto consider = [&](const RayCluster& cl) {
    for (int i = 0; i < cl.ray_count(); ++i) {
      const Point2 p = cl.endpoint(i);
      const double t = dot(p - a.center, u) / len;
      if (t >= -kGeomTol && t <= 1.0 + kGeomTol) selected.push_back(p);
    }
  };
  consider(a);
  consider(b);
  if (selected.size() < 3) {
    selected.clear();
    for (int i = 0; i < a.ray_count(); ++i) selected.push_back(a.endpoint(i));
    for (int i = 0; i < b.ray_count(); ++i) selected.push_back(b.endpoint(i));
  }
  return selected;
}

Polygon cc_connect(const std::vector<Point2>& points) {
  // Canonicalize before any arithmetic so the result is permutation-invariant.
  std::vector<Point2> pts = points;
  std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
    return a.x != b.x ? a.x < b.x : a.y < b.y;
  });
  std::vector<Point2> distinct;
  for (const auto& p : pts) {
    if (distinct.empty() || norm(p - distinct.back()) > kGeomTol) distinct.push_back(p);
  }
  if (distinct.size() < 3) {
    throw Error(ErrorCode::DegeneratePoints, "fewer than 3 distinct points");
  }

  const Point2 base = distinct[0];
  Point2 dir{0.0, 0.0};
  bool collinear = true;
  for (const auto& p : distinct) {
    if (norm(dir) <= kGeomTol) {
      dir = p - base;
      continue;
    }
    if (std::abs(cross(dir, p - base)) > kGeomTol * std::max(1.0, norm(dir))) {
      collinear = false;
      break;
    }
  }
  if (collinear) throw Error(ErrorCode::DegeneratePoints, "points are collinear");

  Point2 centroid{0.0, 0.0};
  for (const auto& p : distinct) centroid = centroid + p;
  centroid = (1.0 / distinct.size()) * centroid;

  struct Keyed {
    double angle, radius;
    Point2 p;
  };
  std::vector<Keyed> keyed;
  keyed.reserve(distinct.size());
  for (const auto& p : distinct) {
    keyed.push_back({std::atan2(p.y - centroid.y, p.x - centroid.x), norm(p - centroid), p});
  }
  std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
    return a.angle != b.angle ? a.angle > b.angle : a.radius < b.radius;
  });

  std::vector<Point2> ordered;
  ordered.reserve(keyed.size());
  for (const auto& k : keyed) ordered.push_back(k.p);
  try {
    return Polygon(std::move(ordered));
  } catch (const Error& e) {
    throw Error(ErrorCode::DegeneratePoints, e.what());
  }
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct MergeSplit {
  double union_ms = 0.0;
  double trace_ms = 0.0;
};

Polygon merge_union_trace(const std::vector<const Polygon*>& polys, int height, int width,
                          MergeSplit* split) {
  if (polys.empty()) throw Error(ErrorCode::EmptyUnion, "no polygons to merge");

  double min_x = polys[0]->bounds().min_x, max_x = polys[0]->bounds().max_x;
  double min_y = polys[0]->bounds().min_y, max_y = polys[0]->bounds().max_y;
  for (const Polygon* p : polys) {
    const Bounds b = p->bounds();
    min_x = std::min(min_x, b.min_x);
    min_y = std::min(min_y, b.min_y);
    max_x = std::max(max_x, b.max_x);
    max_y = std::max(max_y, b.max_y);
  }
  const int c0 = std::max(0, static_cast<int>(std::floor(min_x)) - 1);
  const int r0 = std::max(0, static_cast<int>(std::floor(min_y)) - 1);
  const int c1 = std::min(width - 1, static_cast<int>(std::ceil(max_x)) + 1);
  const int r1 = std::min(height - 1, static_cast<int>(std::ceil(max_y)) + 1);
  if (c0 > c1 || r0 > r1) {
    throw Error(ErrorCode::EmptyUnion, "all polygons fall outside the canvas");
  }

  Clock::time_point t0 = Clock::now();
  Raster grid(r1 - r0 + 1, c1 - c0 + 1, 0.0);
  for (const Polygon* p : polys) rasterize_onto(*p, grid, r0, c0);
  if (split) split->union_ms += ms_since(t0);
  if (grid.foreground_count() == 0) {
    throw Error(ErrorCode::EmptyUnion, "union rasterized to nothing");
  }

  t0 = Clock::now();
  // Contours come back in component order; pick the largest by pixel count.
  const LabeledMask lm = label_components(grid);
  std::vector<Polygon> contours = trace_outer_contours(lm);
  std::size_t best = 0;
  for (std::size_t i = 1; i < contours.size(); ++i) {
    if (lm.components[i].pixel_count > lm.components[best].pixel_count) best = i;
  }
  std::vector<Point2> shifted;
  shifted.reserve(contours[best].size());
  for (const auto& p : contours[best].vertices()) shifted.push_back({p.x + c0, p.y + r0});
  Polygon result(std::move(shifted));
  if (split) split->trace_ms += ms_since(t0);
  return result;
}

}  // namespace

Polygon merge_regions(const std::vector<Polygon>& piecewise, const std::vector<Polygon>& intervals,
                      int height, int width) {
  std::vector<const Polygon*> all;
  for (const auto& p : piecewise) all.push_back(&p);
  for (const auto& p : intervals) all.push_back(&p);
  return merge_union_trace(all, height, width, nullptr);
}

DetectionResult decode(const PredictionMaps& maps, const DecodeConfig& cfg, StageTimes* times) {
  maps.validate();
  if (!(cfg.threshold > 0.0) || !(cfg.threshold < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "threshold must lie in (0, 1)");
  }
  if (cfg.min_area < 1) throw Error(ErrorCode::InvalidArgument, "min_area must be >= 1");
  if (cfg.n < 1) throw Error(ErrorCode::InvalidArgument, "cluster count must be >= 1");

  DetectionResult result;
  const Clock::time_point start = Clock::now();

  Clock::time_point t0 = Clock::now();
  const LabeledMask lm = label_components(maps.shrink_prob, cfg.threshold);
  if (times) times->components += ms_since(t0);

  for (std::size_t ci = 0; ci < lm.components.size(); ++ci) {
    const ComponentStats& stats = lm.components[ci];
    if (stats.pixel_count < cfg.min_area) continue;
    try {
      t0 = Clock::now();
      Raster local(stats.max_r - stats.min_r + 1, stats.max_c - stats.min_c + 1, 0.0);
      for (int r = 0; r < local.height(); ++r) {
        for (int c = 0; c < local.width(); ++c) {
          if (lm.label_at(stats.min_r + r, stats.min_c + c) == static_cast<int32_t>(ci)) {
            local(r, c) = 1.0;
          }
        }
      }
      const int n_eff = std::max(1, std::min(cfg.n, sampling_slots(local, SampleAxis::X)));
      std::vector<Point2> centers = sample_centers(local, n_eff, SampleAxis::X);
      for (auto& p : centers) p = p + Point2{double(stats.min_c), double(stats.min_r)};
      if (times) times->centers += ms_since(t0);

      t0 = Clock::now();
      std::vector<RayCluster> clusters;
      std::vector<Polygon> piecewise;
      clusters.reserve(centers.size());
      for (const Point2& center : centers) {
        clusters.push_back(read_cluster(center, maps.distance_maps, cfg.read_mode));
        piecewise.push_back(piecewise_contour(clusters.back()));
      }
      if (times) times->rays += ms_since(t0);

      t0 = Clock::now();
      std::vector<Polygon> intervals;
      for (std::size_t k = 0; k + 1 < clusters.size(); ++k) {
        intervals.push_back(cc_connect(select_interval_points(clusters[k], clusters[k + 1])));
      }
      if (times) times->cc += ms_since(t0);

      std::vector<const Polygon*> all;
      for (const auto& p : piecewise) all.push_back(&p);
      for (const auto& p : intervals) all.push_back(&p);
      MergeSplit split;
      Polygon merged = merge_union_trace(all, maps.shrink_prob.height(),
                                         maps.shrink_prob.width(), &split);
      if (times) {
        times->union_fill += split.union_ms;
        times->trace += split.trace_ms;
      }

      result.polygons.push_back(std::move(merged));
      result.scores.push_back(stats.value_sum / static_cast<double>(stats.pixel_count));
      if (cfg.trace) {
        result.traces.push_back(
            {std::move(centers), std::move(clusters), std::move(piecewise), std::move(intervals)});
      }
    } catch (const Error& e) {
      result.dropped.push_back("component " + std::to_string(ci) + ": " + e.what());
    }
  }
  if (times) times->total += std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  return result;
}

}  // namespace bipnet
