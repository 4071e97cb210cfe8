#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "xradar/types.hpp"

namespace xradar {

struct ArrayGeometry;

/// Pulse train and sampling parameters. Construct through make(), which
/// enforces the integer Nyquist-bin model N = pri * bandwidth.
struct RadarParams {
  double pri_s = 0.0;
  double bandwidth_hz = 0.0;
  double carrier_hz = 0.0;
  int num_pulses = 0;
  int num_nyquist_bins = 0;
  /// Virtual-array aperture Z in wavelengths (MIMO only).
  std::optional<double> aperture;

  static RadarParams make(double pri_s, double bandwidth_hz, double carrier_hz, int num_pulses,
                          std::optional<double> aperture = std::nullopt);

  double cpi_s() const { return pri_s * num_pulses; }
  double delay_step_s() const { return pri_s / num_nyquist_bins; }
  double doppler_step_rad_s() const { return kTwoPi / (num_pulses * pri_s); }
  double wavelength_m() const { return kSpeedOfLight / carrier_hz; }
};

struct Target {
  double delay_s = 0.0;
  /// Radial Doppler frequency in rad/s; the echo of pulse p carries e^{-j nu p pri}.
  double doppler_rad_s = 0.0;
  /// sin(theta), MIMO only.
  double azimuth_sine = 0.0;
  Complex amplitude{1.0, 0.0};
};

struct TargetScene {
  std::vector<Target> targets;

  std::size_t sparsity() const { return targets.size(); }
};

/// Recovery grid sizes. Steps are pri/N in delay, 2pi/(P pri) in Doppler,
/// and 2/(T R) in azimuth sine.
struct GridSpec {
  int delay_bins = 0;
  int doppler_bins = 0;
  int azimuth_bins = 1;
  /// Delay extends to ambiguity_factor * pri in phase-coded mode.
  int ambiguity_factor = 1;

  static GridSpec for_params(const RadarParams& params, int azimuth_bins = 1, int ambiguity_factor = 1);

  double delay_step_s(const RadarParams& params) const { return params.pri_s / delay_bins; }
  double doppler_step_rad_s(const RadarParams& params) const {
    return kTwoPi / (doppler_bins * params.pri_s);
  }
  double azimuth_step() const { return 2.0 / azimuth_bins; }
  /// Azimuth sine of bin u, wrapped to [-1, 1).
  double azimuth_sine(int bin) const;
};

struct QuantizedTarget {
  int delay_bin = 0;
  int doppler_bin = 0;
  int azimuth_bin = 0;
  int ambiguity_order = 0;
  Complex amplitude{};
  /// Largest distance to the grid (in bins) over the quantized axes.
  double off_grid_bins = 0.0;

  bool off_grid() const { return off_grid_bins > 1e-6; }
  bool operator==(const QuantizedTarget&) const = default;
};

/// Nearest-grid index of value/step with halves resolved toward the lower
/// index, wrapped into [0, size).
int quantize_index(double value_over_step, int size);

/// Snap a physical scene onto the grid. Throws QuantizationCollision when two
/// targets share a (delay, Doppler, azimuth) cell and std::invalid_argument
/// when a target lies outside the unambiguous region.
std::vector<QuantizedTarget> quantize_scene(const TargetScene& scene, const GridSpec& grid,
                                            const RadarParams& params);

/// Grid-cell center of a quantized target in physical units.
Target dequantize(const QuantizedTarget& q, const GridSpec& grid, const RadarParams& params);

/// Scene built from grid indices.
TargetScene scene_from_bins(const std::vector<QuantizedTarget>& cells, const GridSpec& grid,
                            const RadarParams& params);

// Unit conversions. Doppler in rad/s corresponds to 2 * rdot * fc / c in Hz.
double velocity_to_doppler(double radial_velocity_m_s, double carrier_hz);
double doppler_to_velocity(double doppler_rad_s, double carrier_hz);
double delay_to_range(double delay_s);
double range_to_delay(double range_m);

enum class Assumption { far_target, short_pulse, slow_target, small_acceleration, narrowband_array };

std::string to_string(Assumption a);

struct Violation {
  /// Offending target, or nullopt for array-level checks.
  std::optional<std::size_t> target;
  Assumption assumption;
  double lhs = 0.0;
  double bound = 0.0;

  double ratio() const { return bound > 0.0 ? lhs / bound : std::numeric_limits<double>::infinity(); }
};

struct AssumptionPolicy {
  /// "a << b" holds when a <= much_smaller_ratio * b.
  double much_smaller_ratio = 0.1;
};

/// Evaluate the far-target, slow-target, small-acceleration and narrowband
/// inequalities. Violations are reported, never thrown. The narrowband check
/// runs when an array is given or params.aperture is set.
std::vector<Violation> validate_assumptions(const TargetScene& scene, const RadarParams& params,
                                            double pulse_width_s, double acceleration_m_s2,
                                            const ArrayGeometry* array = nullptr,
                                            AssumptionPolicy policy = {});

}  // namespace xradar
