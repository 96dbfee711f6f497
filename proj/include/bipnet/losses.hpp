#pragma once

#include <vector>

#include "bipnet/raster.hpp"

namespace bipnet {

struct LossConfig {
  double lambda = 0.25;  // ray-loss weight
};

/// N x M batch of strictly positive ray distances, row-major.
struct RayBatch {
  int n = 0;
  int m = 0;
  std::vector<double> values;

  RayBatch() = default;
  RayBatch(int n_, int m_, double fill = 1.0)
      : n(n_), m(m_), values(static_cast<std::size_t>(n_) * m_, fill) {}

  double operator()(int j, int i) const { return values[static_cast<std::size_t>(j) * m + i]; }
  double& operator()(int j, int i) { return values[static_cast<std::size_t>(j) * m + i]; }
};

struct DiceLoss {
  double loss = 0.0;
  Raster grad;  // d loss / d pred, per pixel
};

struct RayLoss {
  double loss = 0.0;
  RayBatch grad;  // d loss / d pred, per entry
};

/// Soft dice loss 1 - (2*sum(p*g) + 1) / (sum(p) + sum(g) + 1) with its
/// analytic gradient in pred.
DiceLoss dice_loss(const Raster& pred, const Raster& gt);

/// Mean-over-clusters absolute log-ratio distance loss,
/// (1/N) * sum_j sum_i |ln d_pred - ln d_gt|, with subgradient 0 at the kink.
RayLoss ray_loss(const RayBatch& pred, const RayBatch& gt);

double total_loss(double dice, double ray, const LossConfig& cfg = {});

struct FiniteDiffReport {
  double max_rel_error = 0.0;
  int checked = 0;
  int excluded = 0;  // ray-loss coordinates within 10*eps of the kink
};

/// Central-difference verification of the analytic gradients. Relative error
/// per coordinate is |analytic - numeric| / max(|numeric|, 1e-12); ray
/// coordinates with |d_pred - d_gt| <= 10*eps are excluded and counted.
/// epsilon must lie in (1e-9, 1e-3).
FiniteDiffReport finite_diff_check(const Raster& pred, const Raster& gt, double epsilon);
FiniteDiffReport finite_diff_check(const RayBatch& pred, const RayBatch& gt, double epsilon);

}  // namespace bipnet
