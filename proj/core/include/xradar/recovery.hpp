#pragma once

#include <vector>

#include "xradar/types.hpp"

namespace xradar {

/// One recovered target. Doppler bins use the target convention: a target
/// whose echoes carry e^{-j 2 pi r p / P} is reported at bin r.
struct Detection {
  int delay_bin = 0;
  int doppler_bin = 0;
  int azimuth_bin = 0;
  int ambiguity_order = 0;
  Complex amplitude{};
  /// Off-grid refinement in fractions of a bin (zero unless refinement ran).
  double delay_offset = 0.0;
  double doppler_offset = 0.0;

  double magnitude() const { return std::abs(amplitude); }
};

struct RecoveryResult {
  std::vector<Detection> detections;
  double residual_energy = 0.0;
  int iterations = 0;

  /// Sort detections by decreasing magnitude, ties by (delay, Doppler, azimuth, order).
  void sort_by_magnitude();
};

}  // namespace xradar
