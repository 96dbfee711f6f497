#pragma once

#include <vector>

#include "bipnet/geometry.hpp"

namespace bipnet {

struct MatchedPair {
  int det_index;
  int gt_index;
  double iou;
};

struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
  std::vector<MatchedPair> matched_pairs;  // matches to counted (non-ignored) gt
  int ignored_gt = 0;
  int dets_matched_ignored = 0;
};

/// Greedy one-to-one matching by descending raster IoU at the given
/// threshold. Detections matched to ignored ground truth leave both the
/// numerator and the denominator. Empty-vs-empty counts as perfect.
EvalReport match_and_score(const std::vector<Polygon>& dets, const std::vector<Polygon>& gts,
                           const std::vector<bool>& ignored, double iou_threshold = 0.5);

/// Encode the contour, synthesize its ground-truth maps, decode them back,
/// and return the raster IoU between the reconstruction and the source on a
/// canvas of the given size. 0 when nothing decodes.
double roundtrip_fidelity(const Polygon& contour, int n, int m, double shrink_ratio,
                          int canvas_height, int canvas_width);

}  // namespace bipnet
