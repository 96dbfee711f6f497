#include "bipnet/eval.hpp"

#include <algorithm>
#include <cmath>

#include "bipnet/decoder.hpp"
#include "bipnet/raster.hpp"

namespace bipnet {

namespace {

// Raster every polygon onto a shared canvas sized to cover all inputs,
// padded 8 px so nothing clips.
std::vector<Raster> raster_all(const std::vector<Polygon>& dets, const std::vector<Polygon>& gts,
                               std::vector<Raster>* gt_out) {
  double max_x = 1.0, max_y = 1.0;
  for (const auto* list : {&dets, &gts}) {
    for (const Polygon& p : *list) {
      const Bounds b = p.bounds();
      max_x = std::max(max_x, b.max_x);
      max_y = std::max(max_y, b.max_y);
    }
  }
  const int w = static_cast<int>(std::ceil(max_x)) + 8;
  const int h = static_cast<int>(std::ceil(max_y)) + 8;
  std::vector<Raster> det_masks;
  det_masks.reserve(dets.size());
  for (const Polygon& p : dets) det_masks.push_back(rasterize(p, h, w));
  gt_out->reserve(gts.size());
  for (const Polygon& p : gts) gt_out->push_back(rasterize(p, h, w));
  return det_masks;
}

}  // namespace

EvalReport match_and_score(const std::vector<Polygon>& dets, const std::vector<Polygon>& gts,
                           const std::vector<bool>& ignored, double iou_threshold) {
  if (!(iou_threshold > 0.0) || !(iou_threshold < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "iou threshold must lie in (0, 1)");
  }
  if (!ignored.empty() && ignored.size() != gts.size()) {
    throw Error(ErrorCode::DimensionMismatch, "ignore flags must match ground-truth count");
  }
  auto is_ignored = [&](int g) { return !ignored.empty() && ignored[g]; };

  EvalReport report;
  for (std::size_t g = 0; g < gts.size(); ++g) report.ignored_gt += is_ignored(g);

  struct Pair {
    double iou;
    int det, gt;
  };
  std::vector<Pair> pairs;
  if (!dets.empty() && !gts.empty()) {
    std::vector<Raster> gt_masks;
    const std::vector<Raster> det_masks = raster_all(dets, gts, &gt_masks);
    for (std::size_t d = 0; d < dets.size(); ++d) {
      for (std::size_t g = 0; g < gts.size(); ++g) {
        const double iou = mask_iou(det_masks[d], gt_masks[g]);
        if (iou >= iou_threshold) {
          pairs.push_back({iou, static_cast<int>(d), static_cast<int>(g)});
        }
      }
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.iou != b.iou) return a.iou > b.iou;
    if (a.det != b.det) return a.det < b.det;
    return a.gt < b.gt;
  });

  std::vector<bool> det_used(dets.size(), false);
  std::vector<bool> gt_used(gts.size(), false);
  for (const Pair& p : pairs) {
    if (det_used[p.det] || gt_used[p.gt]) continue;
    det_used[p.det] = true;
    gt_used[p.gt] = true;
    if (is_ignored(p.gt)) {
      ++report.dets_matched_ignored;
    } else {
      report.matched_pairs.push_back({p.det, p.gt, p.iou});
    }
  }

  const int counted_dets = static_cast<int>(dets.size()) - report.dets_matched_ignored;
  const int counted_gts = static_cast<int>(gts.size()) - report.ignored_gt;
  const int matches = static_cast<int>(report.matched_pairs.size());
  if (counted_dets == 0 && counted_gts == 0) {
    report.precision = report.recall = 1.0;
  } else {
    report.precision = counted_dets > 0 ? static_cast<double>(matches) / counted_dets : 0.0;
    report.recall = counted_gts > 0 ? static_cast<double>(matches) / counted_gts : 0.0;
  }
  const double pr = report.precision + report.recall;
  report.f_measure = pr > 0.0 ? 2.0 * report.precision * report.recall / pr : 0.0;
  return report;
}

double roundtrip_fidelity(const Polygon& contour, int n, int m, double shrink_ratio,
                          int canvas_height, int canvas_width) {
  GtMapsResult gt = generate_gt_maps({contour}, canvas_height, canvas_width, m, shrink_ratio);
  DecodeConfig cfg;
  cfg.n = n;
  const DetectionResult det = decode(to_prediction_maps(std::move(gt.maps)), cfg);
  if (det.polygons.empty()) return 0.0;

  Raster decoded(canvas_height, canvas_width, 0.0);
  for (const Polygon& p : det.polygons) rasterize_onto(p, decoded, 0, 0);
  return mask_iou(rasterize(contour, canvas_height, canvas_width), decoded);
}

}  // namespace bipnet
