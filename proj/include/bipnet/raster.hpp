#pragma once

#include <cstdint>
#include <vector>

#include "bipnet/geometry.hpp"

namespace bipnet {

/// Row-major H x W grid of doubles. Pixel (r, c) covers the square
/// [c, c+1) x [r, r+1); its center is (c + 0.5, r + 0.5). Binary masks use
/// exactly {0, 1}; probability maps stay in [0, 1]; distance rasters hold
/// nonnegative pixel distances.
class Raster {
 public:
  Raster() = default;
  Raster(int height, int width, double fill = 0.0);

  int height() const { return height_; }
  int width() const { return width_; }
  bool empty() const { return data_.empty(); }

  double operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * width_ + c]; }
  double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * width_ + c]; }

  bool same_shape(const Raster& other) const {
    return height_ == other.height_ && width_ == other.width_;
  }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  /// True when every value is exactly 0 or 1.
  bool is_binary() const;
  /// Number of pixels with value >= 0.5.
  long long foreground_count() const;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<double> data_;
};

/// Binary rasterization: pixel = 1 iff its center is inside the polygon under
/// the point_in_polygon convention (boundary centers count). Pixels outside
/// the grid are clipped.
Raster rasterize(const Polygon& poly, int height, int width);

/// Rasterize into an existing grid whose pixel (r, c) covers the global
/// square [c + col0, c + col0 + 1) x [r + row0, r + row0 + 1); sets covered
/// pixels to 1 and leaves the rest untouched.
void rasterize_onto(const Polygon& poly, Raster& grid, int row0, int col0);

/// 8-connected foreground component statistics, in raster-scan order of each
/// component's first pixel.
struct ComponentStats {
  int min_r = 0, min_c = 0, max_r = 0, max_c = 0;
  long long pixel_count = 0;
  double value_sum = 0.0;  // sum of source values over the component
};

struct LabeledMask {
  int height = 0, width = 0;
  std::vector<int32_t> labels;  // -1 background, else component index
  std::vector<ComponentStats> components;

  int32_t label_at(int r, int c) const { return labels[static_cast<std::size_t>(r) * width + c]; }
};

/// Threshold at `threshold` (>=) and label 8-connected components.
LabeledMask label_components(const Raster& mask, double threshold = 0.5);

/// One simple polygon per 8-connected foreground component: Moore-neighbor
/// boundary tracing with vertices at boundary-pixel centers, holes ignored.
/// Components too thin for a center trace fall back to their pixel-edge
/// outline. Empty mask yields an empty list.
std::vector<Polygon> trace_outer_contours(const Raster& mask);

/// Same, over an existing labeling; contours come back in component order.
std::vector<Polygon> trace_outer_contours(const LabeledMask& lm);

/// |a AND b| / |a OR b| over foreground (>= 0.5); 0 when the union is empty.
double mask_iou(const Raster& a, const Raster& b);

}  // namespace bipnet
