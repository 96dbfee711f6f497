#pragma once

#include <cstdint>
#include <vector>

#include "bipnet/annotations.hpp"

namespace bipnet {

/// Sine-ribbon generator parameters. The centerline is
/// y(x) = amplitude * sin(2*pi*x / wavelength) sampled at 20 points over
/// [0, length], offset +-half_width along the centerline normals; instances
/// are rotated uniformly in [-max_rotation, max_rotation] and translated to
/// fit the canvas without overlapping previously placed instances.
/// wavelength >= 4 * amplitude keeps the curvature bounded so the offset
/// sides stay simple.
struct SynthParams {
  uint64_t seed = 0;
  int count = 1;
  double amplitude = 18.0;
  double wavelength = 110.0;
  double half_width = 12.0;
  double length = 220.0;
  int canvas_height = 352;
  int canvas_width = 352;
  double max_rotation = 0.7853981633974483;  // pi/4
};

/// Deterministic for a given seed; throws CannotPlace after 100 failed
/// placement attempts for any instance.
std::vector<AnnotationRecord> synth_generate(const SynthParams& params);

}  // namespace bipnet
