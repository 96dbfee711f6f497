#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bipnet/raster.hpp"

namespace bipnet {

/// A center point plus m ray distances. Ray i points along
/// theta_i = i*2*pi/m in image coordinates (+x right, +y down); directions
/// are implicit, never stored.
struct RayCluster {
  Point2 center;
  std::vector<double> distances;  // strictly positive, pixels

  int ray_count() const { return static_cast<int>(distances.size()); }
  /// Endpoint of ray i: center + distances[i]*(cos theta_i, sin theta_i).
  Point2 endpoint(int i) const;
};

double ray_angle(int i, int m);

/// One text instance as n ray clusters ordered along the sampling axis.
struct InstanceEncoding {
  std::vector<RayCluster> clusters;
  int ray_count = 0;  // shared m
  std::optional<int> source_polygon_id;
};

/// Ground-truth map stack: a binary shrink mask plus one distance raster per
/// ray direction; distance maps are 0 exactly where the shrink mask is 0.
struct GtMaps {
  Raster shrink_mask;
  std::vector<Raster> distance_maps;
};

struct GtMapsResult {
  GtMaps maps;
  std::vector<std::string> warnings;  // skipped instances, one line each
};

enum class SampleAxis { X, Principal };

/// Equidistant center sampling of a binary mask. In X mode, abscissas split
/// the foreground column span into n interior slots, snap to the nearest
/// foreground column (nearer wins, lower index on ties), and take the median
/// foreground row of that column. Principal mode applies the same rule in the
/// frame rotated so the largest-covariance axis is horizontal. Every returned
/// center is the center of a foreground pixel; centers strictly increase
/// along the sampling axis.
std::vector<Point2> sample_centers(const Raster& mask, int n, SampleAxis axis = SampleAxis::X);

/// Number of distinct sampling slots (foreground columns, or principal-axis
/// bins) available to sample_centers; callers reduce n to this count.
int sampling_slots(const Raster& mask, SampleAxis axis = SampleAxis::X);

/// Cast m evenly spaced rays from center against the contour.
RayCluster cast_cluster(const Point2& center, const Polygon& contour, int m);

/// Shrink the contour (with the halving fallback), rasterize the shrink
/// region, sample n centers, and cast each against the ORIGINAL contour.
/// If the shrink region spans fewer than n foreground columns, n is reduced
/// to the available count (minimum 1).
InstanceEncoding encode_instance(const Polygon& contour, int n, int m, double shrink_ratio,
                                 int mask_height, int mask_width,
                                 SampleAxis axis = SampleAxis::X);

/// Dense ground-truth generation: the shrink mask is the union of the
/// rasterized shrunk contours (later instances win overlaps); each in-mask
/// pixel's distance channel i holds the first-hit ray distance from that
/// pixel's center against the owning original contour. Instances whose
/// geometry fails are skipped and reported in warnings.
GtMapsResult generate_gt_maps(const std::vector<Polygon>& contours, int height, int width, int m,
                              double shrink_ratio);

}  // namespace bipnet
