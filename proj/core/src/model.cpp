#include "xradar/model.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <tuple>

#include "xradar/geometry.hpp"

namespace xradar {

RadarParams RadarParams::make(double pri_s, double bandwidth_hz, double carrier_hz, int num_pulses,
                              std::optional<double> aperture) {
  if (!(pri_s > 0.0)) throw std::invalid_argument("RadarParams: pri must be positive");
  if (!(bandwidth_hz > 0.0)) throw std::invalid_argument("RadarParams: bandwidth must be positive");
  if (num_pulses < 1) throw std::invalid_argument("RadarParams: at least one pulse required");
  if (carrier_hz < 0.0) throw std::invalid_argument("RadarParams: carrier must be non-negative");
  const double product = pri_s * bandwidth_hz;
  const double rounded = std::round(product);
  if (std::abs(product - rounded) >= 1e-9 || rounded < 1.0) {
    std::ostringstream msg;
    msg << "RadarParams: pri * bandwidth = " << product << " is not an integer bin count";
    throw std::invalid_argument(msg.str());
  }
  if (aperture && !(*aperture >= 0.0)) throw std::invalid_argument("RadarParams: negative aperture");
  RadarParams p;
  p.pri_s = pri_s;
  p.bandwidth_hz = bandwidth_hz;
  p.carrier_hz = carrier_hz;
  p.num_pulses = num_pulses;
  p.num_nyquist_bins = static_cast<int>(rounded);
  p.aperture = aperture;
  return p;
}

GridSpec GridSpec::for_params(const RadarParams& params, int azimuth_bins, int ambiguity_factor) {
  if (azimuth_bins < 1 || ambiguity_factor < 1)
    throw std::invalid_argument("GridSpec: azimuth bins and ambiguity factor must be >= 1");
  return {params.num_nyquist_bins, params.num_pulses, azimuth_bins, ambiguity_factor};
}

double GridSpec::azimuth_sine(int bin) const {
  double s = bin * azimuth_step();
  if (s >= 1.0) s -= 2.0;
  return s;
}

int quantize_index(double value_over_step, int size) {
  const auto idx = static_cast<long long>(std::ceil(value_over_step - 0.5));
  const long long m = ((idx % size) + size) % size;
  return static_cast<int>(m);
}

std::vector<QuantizedTarget> quantize_scene(const TargetScene& scene, const GridSpec& grid,
                                            const RadarParams& params) {
  if (grid.delay_bins < 1 || grid.doppler_bins < 1 || grid.azimuth_bins < 1)
    throw std::invalid_argument("quantize_scene: empty grid");
  const double pri = params.pri_s;
  const int q_max = grid.ambiguity_factor;
  const int total_delay_bins = grid.delay_bins * q_max;

  std::vector<QuantizedTarget> out;
  out.reserve(scene.targets.size());
  std::set<std::tuple<int, int, int>> occupied;
  for (std::size_t i = 0; i < scene.targets.size(); ++i) {
    const Target& t = scene.targets[i];
    if (t.delay_s < 0.0 || t.delay_s >= q_max * pri)
      throw std::invalid_argument("quantize_scene: target " + std::to_string(i) +
                                  " delay outside the unambiguous range");
    if (q_max == 1 && std::abs(t.doppler_rad_s * pri) > kPi + 1e-12)
      throw std::invalid_argument("quantize_scene: target " + std::to_string(i) +
                                  " Doppler outside the unambiguous band");
    if (t.azimuth_sine < -1.0 || t.azimuth_sine > 1.0)
      throw std::invalid_argument("quantize_scene: azimuth sine outside [-1, 1]");

    const double delay_units = t.delay_s * grid.delay_bins / pri;
    const double doppler_units = t.doppler_rad_s * grid.doppler_bins * pri / kTwoPi;
    const double azimuth_units = grid.azimuth_bins > 1 ? t.azimuth_sine * grid.azimuth_bins / 2.0 : 0.0;

    QuantizedTarget q;
    const int total = quantize_index(delay_units, total_delay_bins);
    q.delay_bin = total % grid.delay_bins;
    q.ambiguity_order = total / grid.delay_bins;
    q.doppler_bin = quantize_index(doppler_units, grid.doppler_bins);
    q.azimuth_bin = grid.azimuth_bins > 1 ? quantize_index(azimuth_units, grid.azimuth_bins) : 0;
    q.amplitude = t.amplitude;
    const auto dist = [](double x) { return std::abs(x - std::round(x)); };
    q.off_grid_bins = std::max({dist(delay_units), dist(doppler_units), dist(azimuth_units)});

    if (!occupied.emplace(q.delay_bin + grid.delay_bins * q.ambiguity_order, q.doppler_bin, q.azimuth_bin)
             .second) {
      throw QuantizationCollision("quantize_scene: target " + std::to_string(i) +
                                  " shares a grid cell with an earlier target");
    }
    out.push_back(q);
  }
  return out;
}

Target dequantize(const QuantizedTarget& q, const GridSpec& grid, const RadarParams& params) {
  Target t;
  t.delay_s = (q.delay_bin + q.ambiguity_order * grid.delay_bins) * grid.delay_step_s(params);
  int r = q.doppler_bin;
  if (2 * r > grid.doppler_bins) r -= grid.doppler_bins;  // signed Doppler band
  t.doppler_rad_s = r * grid.doppler_step_rad_s(params);
  t.azimuth_sine = grid.azimuth_bins > 1 ? grid.azimuth_sine(q.azimuth_bin) : 0.0;
  t.amplitude = q.amplitude;
  return t;
}

TargetScene scene_from_bins(const std::vector<QuantizedTarget>& cells, const GridSpec& grid,
                            const RadarParams& params) {
  TargetScene scene;
  scene.targets.reserve(cells.size());
  for (const auto& c : cells) scene.targets.push_back(dequantize(c, grid, params));
  return scene;
}

double velocity_to_doppler(double radial_velocity_m_s, double carrier_hz) {
  return 2.0 * kTwoPi * radial_velocity_m_s * carrier_hz / kSpeedOfLight;
}

double doppler_to_velocity(double doppler_rad_s, double carrier_hz) {
  return doppler_rad_s * kSpeedOfLight / (2.0 * kTwoPi * carrier_hz);
}

double delay_to_range(double delay_s) { return 0.5 * kSpeedOfLight * delay_s; }

double range_to_delay(double range_m) { return 2.0 * range_m / kSpeedOfLight; }

std::string to_string(Assumption a) {
  switch (a) {
    case Assumption::far_target: return "far target";
    case Assumption::short_pulse: return "constant Doppler phase over the pulse";
    case Assumption::slow_target: return "constant delay over the CPI";
    case Assumption::small_acceleration: return "small acceleration";
    case Assumption::narrowband_array: return "narrowband aperture";
  }
  return "unknown";
}

std::vector<Violation> validate_assumptions(const TargetScene& scene, const RadarParams& params,
                                            double pulse_width_s, double acceleration_m_s2,
                                            const ArrayGeometry* array, AssumptionPolicy policy) {
  std::vector<Violation> out;
  const double ratio = policy.much_smaller_ratio;
  const double cpi = params.cpi_s();
  const auto check = [&](std::optional<std::size_t> who, Assumption a, double lhs, double bound) {
    if (lhs > ratio * bound) out.push_back({who, a, lhs, bound});
  };

  for (std::size_t i = 0; i < scene.targets.size(); ++i) {
    const Target& t = scene.targets[i];
    // Doppler in Hz: the inequalities are written for nu = 2 rdot fc / c.
    const double doppler_hz = std::abs(t.doppler_rad_s) / kTwoPi;
    check(i, Assumption::far_target, doppler_hz, params.carrier_hz * t.delay_s / cpi);
    check(i, Assumption::short_pulse, std::abs(t.doppler_rad_s) * pulse_width_s, 1.0);
    check(i, Assumption::slow_target, doppler_hz, params.carrier_hz / (cpi * params.bandwidth_hz));
  }
  if (!scene.targets.empty() && params.carrier_hz > 0.0) {
    check(std::nullopt, Assumption::small_acceleration, std::abs(acceleration_m_s2),
          kSpeedOfLight / (2.0 * params.carrier_hz * cpi * cpi));
  }

  std::optional<double> aperture = params.aperture;
  if (array) aperture = array->aperture();
  if (aperture && params.carrier_hz > 0.0) {
    check(std::nullopt, Assumption::narrowband_array, 2.0 * (*aperture) * params.wavelength_m() / kSpeedOfLight,
          1.0 / params.bandwidth_hz);
  }
  return out;
}

}  // namespace xradar
