#include "bipnet/losses.hpp"

#include <algorithm>
#include <cmath>

namespace bipnet {

DiceLoss dice_loss(const Raster& pred, const Raster& gt) {
  if (!pred.same_shape(gt)) {
    throw Error(ErrorCode::DimensionMismatch, "dice_loss shapes differ");
  }
  const auto& p = pred.data();
  const auto& g = gt.data();
  double inter = 0.0, sum_p = 0.0, sum_g = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    inter += p[i] * g[i];
    sum_p += p[i];
    sum_g += g[i];
  }
  const double numer = 2.0 * inter + 1.0;
  const double denom = sum_p + sum_g + 1.0;

  DiceLoss out;
  out.loss = 1.0 - numer / denom;
  out.grad = Raster(pred.height(), pred.width(), 0.0);
  auto& dv = out.grad.data();
  for (std::size_t i = 0; i < p.size(); ++i) {
    dv[i] = -(2.0 * g[i] * denom - numer) / (denom * denom);
  }
  return out;
}

RayLoss ray_loss(const RayBatch& pred, const RayBatch& gt) {
  if (pred.n != gt.n || pred.m != gt.m) {
    throw Error(ErrorCode::DimensionMismatch, "ray_loss batch shapes differ");
  }
  for (double v : pred.values) {
    if (!(v > 0.0)) throw Error(ErrorCode::NonPositiveDistance, "predicted distance <= 0");
  }
  for (double v : gt.values) {
    if (!(v > 0.0)) throw Error(ErrorCode::NonPositiveDistance, "ground-truth distance <= 0");
  }

  RayLoss out;
  out.grad = RayBatch(pred.n, pred.m, 0.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.values.size(); ++i) {
    const double diff = std::log(pred.values[i]) - std::log(gt.values[i]);
    acc += std::abs(diff);
    const double sign = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
    out.grad.values[i] = sign / (pred.n * pred.values[i]);
  }
  out.loss = acc / pred.n;
  return out;
}

double total_loss(double dice, double ray, const LossConfig& cfg) {
  if (!(cfg.lambda > 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda must be positive");
  return dice + cfg.lambda * ray;
}

namespace {

void check_epsilon(double epsilon) {
  if (!(epsilon > 1e-9) || !(epsilon < 1e-3)) {
    throw Error(ErrorCode::InvalidArgument, "epsilon must lie in (1e-9, 1e-3)");
  }
}

double rel_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max(std::abs(numeric), 1e-12);
}

}  // namespace

FiniteDiffReport finite_diff_check(const Raster& pred, const Raster& gt, double epsilon) {
  check_epsilon(epsilon);
  const DiceLoss base = dice_loss(pred, gt);
  Raster work = pred;
  FiniteDiffReport report;
  for (int r = 0; r < pred.height(); ++r) {
    for (int c = 0; c < pred.width(); ++c) {
      const double saved = work(r, c);
      work(r, c) = saved + epsilon;
      const double up = dice_loss(work, gt).loss;
      work(r, c) = saved - epsilon;
      const double down = dice_loss(work, gt).loss;
      work(r, c) = saved;
      const double numeric = (up - down) / (2.0 * epsilon);
      report.max_rel_error = std::max(report.max_rel_error, rel_error(base.grad(r, c), numeric));
      ++report.checked;
    }
  }
  return report;
}

FiniteDiffReport finite_diff_check(const RayBatch& pred, const RayBatch& gt, double epsilon) {
  check_epsilon(epsilon);
  const RayLoss base = ray_loss(pred, gt);
  RayBatch work = pred;
  FiniteDiffReport report;
  for (std::size_t i = 0; i < pred.values.size(); ++i) {
    if (std::abs(pred.values[i] - gt.values[i]) <= 10.0 * epsilon) {
      ++report.excluded;  // the absolute-log kink: no meaningful two-sided slope
      continue;
    }
    const double saved = work.values[i];
    work.values[i] = saved + epsilon;
    const double up = ray_loss(work, gt).loss;
    work.values[i] = saved - epsilon;
    const double down = ray_loss(work, gt).loss;
    work.values[i] = saved;
    const double numeric = (up - down) / (2.0 * epsilon);
    report.max_rel_error = std::max(report.max_rel_error, rel_error(base.grad.values[i], numeric));
    ++report.checked;
  }
  return report;
}

}  // namespace bipnet
