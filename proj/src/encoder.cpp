#include "bipnet/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bipnet {

double ray_angle(int i, int m) { return i * 2.0 * std::numbers::pi / m; }

Point2 RayCluster::endpoint(int i) const {
  const double a = ray_angle(i, ray_count());
  return {center.x + distances[i] * std::cos(a), center.y + distances[i] * std::sin(a)};
}

namespace {

struct ColumnIndex {
  std::vector<std::vector<int>> rows;  // foreground row indices per column, ascending
  int col_min = -1, col_max = -1;
  int nonempty = 0;
};

ColumnIndex index_columns(const Raster& mask) {
  ColumnIndex ix;
  ix.rows.resize(mask.width());
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      if (mask(r, c) >= 0.5) ix.rows[c].push_back(r);
    }
  }
  for (int c = 0; c < mask.width(); ++c) {
    if (ix.rows[c].empty()) continue;
    ++ix.nonempty;
    if (ix.col_min < 0) ix.col_min = c;
    ix.col_max = c;
  }
  return ix;
}

struct PrincipalBins {
  struct Pix {
    double u, v;
    int r, c;
  };
  std::vector<Pix> pts;
  std::vector<std::vector<int>> by_bin;
  int nonempty = 0;
};

PrincipalBins bin_along_principal_axis(const Raster& mask) {
  PrincipalBins out;
  double mx = 0.0, my = 0.0;
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      if (mask(r, c) >= 0.5) {
        out.pts.push_back({0.0, 0.0, r, c});
        mx += c + 0.5;
        my += r + 0.5;
      }
    }
  }
  if (out.pts.empty()) return out;
  mx /= out.pts.size();
  my /= out.pts.size();

  double cxx = 0.0, cxy = 0.0, cyy = 0.0;
  for (const auto& p : out.pts) {
    const double dx = p.c + 0.5 - mx;
    const double dy = p.r + 0.5 - my;
    cxx += dx * dx;
    cxy += dx * dy;
    cyy += dy * dy;
  }
  const double phi = 0.5 * std::atan2(2.0 * cxy, cxx - cyy);
  const double cphi = std::cos(phi), sphi = std::sin(phi);
  double umin = 0.0, umax = 0.0;
  for (std::size_t i = 0; i < out.pts.size(); ++i) {
    auto& p = out.pts[i];
    const double dx = p.c + 0.5 - mx;
    const double dy = p.r + 0.5 - my;
    p.u = cphi * dx + sphi * dy;
    p.v = -sphi * dx + cphi * dy;
    umin = (i == 0) ? p.u : std::min(umin, p.u);
    umax = (i == 0) ? p.u : std::max(umax, p.u);
  }

  const int bins = static_cast<int>(std::floor(umax - umin)) + 1;
  out.by_bin.resize(bins);
  for (std::size_t i = 0; i < out.pts.size(); ++i) {
    const int b = std::clamp(static_cast<int>(std::floor(out.pts[i].u - umin)), 0, bins - 1);
    out.by_bin[b].push_back(static_cast<int>(i));
  }
  for (const auto& members : out.by_bin) out.nonempty += !members.empty();
  return out;
}

// Snap a continuous abscissa to the nearest usable slot: nearer wins, lower
// index breaks ties, already-taken slots are skipped.
int snap_slot(double a, int lo, int hi, const std::vector<bool>& usable, std::vector<bool>& taken) {
  const int c0 = std::clamp(static_cast<int>(std::floor(a)), lo, hi);
  for (int radius = 0; radius <= hi - lo; ++radius) {
    const int left = c0 - radius;
    if (left >= lo && usable[left] && !taken[left]) return left;
    const int right = c0 + radius;
    if (radius > 0 && right <= hi && usable[right] && !taken[right]) return right;
  }
  return -1;
}

std::vector<Point2> sample_centers_x(const Raster& mask, int n) {
  const ColumnIndex ix = index_columns(mask);
  if (ix.nonempty == 0) throw Error(ErrorCode::EmptyMask, "no foreground pixels to sample");
  if (ix.nonempty < n) {
    throw Error(ErrorCode::TooNarrow, "fewer foreground columns than requested centers");
  }
  const double span = ix.col_max - ix.col_min + 1;
  std::vector<bool> usable(mask.width(), false);
  std::vector<bool> taken(mask.width(), false);
  for (int c = 0; c < mask.width(); ++c) usable[c] = !ix.rows[c].empty();

  std::vector<Point2> centers;
  centers.reserve(n);
  for (int k = 0; k < n; ++k) {
    const double a = ix.col_min + (k + 0.5) * span / n;
    const int c = snap_slot(a, ix.col_min, ix.col_max, usable, taken);
    taken[c] = true;
    const auto& rows = ix.rows[c];
    centers.push_back({c + 0.5, rows[rows.size() / 2] + 0.5});
  }
  std::sort(centers.begin(), centers.end(),
            [](const Point2& a, const Point2& b) { return a.x < b.x; });
  return centers;
}

std::vector<Point2> sample_centers_principal(const Raster& mask, int n) {
  PrincipalBins bins = bin_along_principal_axis(mask);
  if (bins.pts.empty()) throw Error(ErrorCode::EmptyMask, "no foreground pixels to sample");
  if (bins.nonempty < n) {
    throw Error(ErrorCode::TooNarrow, "fewer principal-axis slots than requested centers");
  }
  const int nb = static_cast<int>(bins.by_bin.size());
  std::vector<bool> usable(nb, false), taken(nb, false);
  for (int b = 0; b < nb; ++b) usable[b] = !bins.by_bin[b].empty();

  std::vector<std::pair<double, Point2>> picked;  // keyed by u for ordering
  for (int k = 0; k < n; ++k) {
    const double a = (k + 0.5) * static_cast<double>(nb) / n;
    const int b = snap_slot(a, 0, nb - 1, usable, taken);
    taken[b] = true;
    auto& members = bins.by_bin[b];
    std::sort(members.begin(), members.end(), [&](int lhs, int rhs) {
      const auto& pl = bins.pts[lhs];
      const auto& pr = bins.pts[rhs];
      if (pl.v != pr.v) return pl.v < pr.v;
      if (pl.r != pr.r) return pl.r < pr.r;
      return pl.c < pr.c;
    });
    const auto& chosen = bins.pts[members[members.size() / 2]];
    picked.push_back({chosen.u, {chosen.c + 0.5, chosen.r + 0.5}});
  }
  std::sort(picked.begin(), picked.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Point2> centers;
  centers.reserve(picked.size());
  for (const auto& [u, p] : picked) centers.push_back(p);
  return centers;
}

}  // namespace

int sampling_slots(const Raster& mask, SampleAxis axis) {
  if (axis == SampleAxis::X) return index_columns(mask).nonempty;
  return bin_along_principal_axis(mask).nonempty;
}

std::vector<Point2> sample_centers(const Raster& mask, int n, SampleAxis axis) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "center count must be >= 1");
  return axis == SampleAxis::X ? sample_centers_x(mask, n) : sample_centers_principal(mask, n);
}

RayCluster cast_cluster(const Point2& center, const Polygon& contour, int m) {
  if (m < 3) throw Error(ErrorCode::InvalidArgument, "ray count must be >= 3");
  RayCluster cluster;
  cluster.center = center;
  cluster.distances.resize(m);
  for (int i = 0; i < m; ++i) {
    cluster.distances[i] = ray_polygon_first_hit(center, ray_angle(i, m), contour);
  }
  return cluster;
}

InstanceEncoding encode_instance(const Polygon& contour, int n, int m, double shrink_ratio,
                                 int mask_height, int mask_width, SampleAxis axis) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "cluster count must be >= 1");
  const Polygon shrunk = shrink_polygon_fallback(contour, shrink_ratio);
  const Raster mask = rasterize(shrunk, mask_height, mask_width);
  if (mask.foreground_count() == 0) {
    throw Error(ErrorCode::EmptyMask, "shrink region rasterized to nothing");
  }
  const int n_eff = std::max(1, std::min(n, sampling_slots(mask, axis)));
  InstanceEncoding enc;
  enc.ray_count = m;
  for (const Point2& center : sample_centers(mask, n_eff, axis)) {
    enc.clusters.push_back(cast_cluster(center, contour, m));
  }
  return enc;
}

GtMapsResult generate_gt_maps(const std::vector<Polygon>& contours, int height, int width, int m,
                              double shrink_ratio) {
  if (m < 3) throw Error(ErrorCode::InvalidArgument, "ray count must be >= 3");
  GtMapsResult result;
  result.maps.shrink_mask = Raster(height, width, 0.0);
  result.maps.distance_maps.assign(m, Raster(height, width, 0.0));

  std::vector<int32_t> owner(static_cast<std::size_t>(height) * width, -1);
  for (std::size_t idx = 0; idx < contours.size(); ++idx) {
    try {
      const Polygon shrunk = shrink_polygon_fallback(contours[idx], shrink_ratio);
      const Raster local = rasterize(shrunk, height, width);
      bool any = false;
      for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
          if (local(r, c) >= 0.5) {
            result.maps.shrink_mask(r, c) = 1.0;
            owner[static_cast<std::size_t>(r) * width + c] = static_cast<int32_t>(idx);
            any = true;
          }
        }
      }
      if (!any) {
        result.warnings.push_back("instance " + std::to_string(idx) +
                                  ": shrink region left no pixels on the canvas");
      }
    } catch (const Error& e) {
      result.warnings.push_back("instance " + std::to_string(idx) + ": " + e.what());
    }
  }

  std::vector<bool> warned(contours.size(), false);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const int32_t own = owner[static_cast<std::size_t>(r) * width + c];
      if (own < 0) continue;
      const Point2 center{c + 0.5, r + 0.5};
      try {
        for (int i = 0; i < m; ++i) {
          result.maps.distance_maps[i](r, c) =
              ray_polygon_first_hit(center, ray_angle(i, m), contours[own]);
        }
      } catch (const Error& e) {
        result.maps.shrink_mask(r, c) = 0.0;
        for (int i = 0; i < m; ++i) result.maps.distance_maps[i](r, c) = 0.0;
        if (!warned[own]) {
          warned[own] = true;
          result.warnings.push_back("instance " + std::to_string(own) + ": " + e.what());
        }
      }
    }
  }
  return result;
}

}  // namespace bipnet
