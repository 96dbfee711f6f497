#pragma once

#include <string>
#include <vector>

#include "bipnet/encoder.hpp"

namespace bipnet {

/// CNN-replacement input: one shrink-probability raster plus m ray-distance
/// rasters, all the same shape.
struct PredictionMaps {
  Raster shrink_prob;
  std::vector<Raster> distance_maps;

  int ray_count() const { return static_cast<int>(distance_maps.size()); }
  void validate() const;  // throws DimensionMismatch
};

PredictionMaps to_prediction_maps(GtMaps maps);

enum class ReadMode { Nearest, Mean3x3 };

struct DecodeConfig {
  double threshold = 0.5;
  int min_area = 16;
  int n = 5;
  ReadMode read_mode = ReadMode::Nearest;
  bool trace = false;  // retain per-instance debug record
};

/// Per-instance debug record kept when DecodeConfig::trace is set.
struct InstanceTrace {
  std::vector<Point2> centers;
  std::vector<RayCluster> clusters;
  std::vector<Polygon> piecewise;
  std::vector<Polygon> intervals;
};

/// Wall-clock accumulators for the six decode stages, milliseconds.
struct StageTimes {
  double components = 0.0;
  double centers = 0.0;
  double rays = 0.0;
  double cc = 0.0;
  double union_fill = 0.0;
  double trace = 0.0;
  double total = 0.0;
};

struct DetectionResult {
  std::vector<Polygon> polygons;
  std::vector<double> scores;  // mean shrink probability over component pixels
  std::vector<InstanceTrace> traces;   // parallel to polygons when tracing
  std::vector<std::string> dropped;    // diagnostics for failed components
};

/// Threshold, 8-connect, drop components below min_area; component masks are
/// full-size and returned in raster-scan order of each component's first
/// pixel.
std::vector<Raster> binarize_components(const Raster& shrink_prob, double threshold, int min_area);

/// Form a cluster by reading every distance map at the pixel containing
/// center (or the in-bounds 3x3 mean); distances are clamped below at 0.5 px.
RayCluster read_cluster(const Point2& center, const std::vector<Raster>& distance_maps,
                        ReadMode mode = ReadMode::Nearest);

/// The cluster's m endpoints connected in index order and closed; star-shaped
/// about the center, hence simple.
Polygon piecewise_contour(const RayCluster& cluster);

/// Endpoints of two adjacent clusters whose projection onto the
/// center-to-center segment falls in [0, 1]; falls back to all endpoints of
/// both clusters when fewer than 3 qualify.
std::vector<Point2> select_interval_points(const RayCluster& a, const RayCluster& b);

/// Order points by descending angle about their centroid (ties: smaller
/// radius first) and close the polygon.
Polygon cc_connect(const std::vector<Point2>& points);

/// Raster union of all polygons on an height x width grid, traced back to the
/// largest outer contour.
Polygon merge_regions(const std::vector<Polygon>& piecewise, const std::vector<Polygon>& intervals,
                      int height, int width);

/// Full bottom-up reconstruction; pure function of (maps, cfg). Per-component
/// failures are collected in DetectionResult::dropped, never thrown.
DetectionResult decode(const PredictionMaps& maps, const DecodeConfig& cfg = {},
                       StageTimes* times = nullptr);

}  // namespace bipnet
