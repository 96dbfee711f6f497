#include "bipnet/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace bipnet {

namespace {

// Engine-only uniform draw so output is identical across standard libraries.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

std::vector<Point2> base_ribbon(const SynthParams& p) {
  constexpr int kSamples = 20;
  const double k = 2.0 * std::numbers::pi / p.wavelength;
  std::vector<Point2> left(kSamples), right(kSamples);
  for (int i = 0; i < kSamples; ++i) {
    const double x = p.length * i / (kSamples - 1);
    const double y = p.amplitude * std::sin(k * x);
    const double slope = p.amplitude * k * std::cos(k * x);
    const double inv_len = 1.0 / std::hypot(1.0, slope);
    const Point2 normal{-slope * inv_len, inv_len};
    left[i] = {x + p.half_width * normal.x, y + p.half_width * normal.y};
    right[i] = {x - p.half_width * normal.x, y - p.half_width * normal.y};
  }
  std::vector<Point2> out(left.begin(), left.end());
  out.insert(out.end(), right.rbegin(), right.rend());
  return out;
}

struct Box {
  double min_x, min_y, max_x, max_y;
  bool intersects(const Box& o, double pad) const {
    return !(max_x + pad < o.min_x || o.max_x + pad < min_x || max_y + pad < o.min_y ||
             o.max_y + pad < min_y);
  }
};

Box bounds_of(const std::vector<Point2>& pts) {
  Box b{pts[0].x, pts[0].y, pts[0].x, pts[0].y};
  for (const auto& p : pts) {
    b.min_x = std::min(b.min_x, p.x);
    b.min_y = std::min(b.min_y, p.y);
    b.max_x = std::max(b.max_x, p.x);
    b.max_y = std::max(b.max_y, p.y);
  }
  return b;
}

}  // namespace

std::vector<AnnotationRecord> synth_generate(const SynthParams& params) {
  if (!(params.wavelength > 0.0) || params.wavelength < 4.0 * params.amplitude) {
    throw Error(ErrorCode::InvalidArgument, "wavelength must be >= 4 * amplitude");
  }
  if (!(params.half_width > 0.0) || !(params.length > 0.0) || params.amplitude < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "ribbon dimensions must be positive");
  }
  if (params.count < 0 || params.canvas_height < 1 || params.canvas_width < 1) {
    throw Error(ErrorCode::InvalidArgument, "bad instance count or canvas size");
  }

  constexpr double kMargin = 8.0;
  constexpr double kSeparation = 4.0;
  std::mt19937_64 rng(params.seed);
  const std::vector<Point2> base = base_ribbon(params);

  std::vector<AnnotationRecord> records;
  std::vector<Box> placed;
  for (int inst = 0; inst < params.count; ++inst) {
    bool done = false;
    for (int attempt = 0; attempt < 100 && !done; ++attempt) {
      const double theta = uniform(rng, -params.max_rotation, params.max_rotation);
      const double ct = std::cos(theta), st = std::sin(theta);
      std::vector<Point2> pts(base.size());
      for (std::size_t i = 0; i < base.size(); ++i) {
        pts[i] = {ct * base[i].x - st * base[i].y, st * base[i].x + ct * base[i].y};
      }
      const Box b = bounds_of(pts);
      const double tx_lo = kMargin - b.min_x;
      const double tx_hi = params.canvas_width - kMargin - b.max_x;
      const double ty_lo = kMargin - b.min_y;
      const double ty_hi = params.canvas_height - kMargin - b.max_y;
      if (tx_lo > tx_hi || ty_lo > ty_hi) continue;
      const double tx = uniform(rng, tx_lo, tx_hi);
      const double ty = uniform(rng, ty_lo, ty_hi);
      for (auto& p : pts) p = {p.x + tx, p.y + ty};

      const Box moved = bounds_of(pts);
      bool clash = false;
      for (const Box& other : placed) {
        if (moved.intersects(other, kSeparation)) {
          clash = true;
          break;
        }
      }
      if (clash) continue;

      placed.push_back(moved);
      records.push_back({Polygon(std::move(pts)), false, AnnotationSource::Synth});
      done = true;
    }
    if (!done) {
      throw Error(ErrorCode::CannotPlace,
                  "could not place instance " + std::to_string(inst) + " after 100 attempts");
    }
  }
  return records;
}

}  // namespace bipnet
