#pragma once

#include <cstdint>
#include <vector>

#include "xradar/focusing.hpp"
#include "xradar/geometry.hpp"
#include "xradar/recovery.hpp"
#include "xradar/synth.hpp"

namespace xradar {

enum class ArrayMode { ula, random };

/// M of T transmitters and Q of R receivers inside a virtual ULA of aperture
/// Z = T R / 2. ULA mode keeps the first M and Q elements of the full ULA
/// (xi_m = R m / 2, zeta_q = q / 2); random mode draws sorted positions from U[0, Z].
ArrayGeometry make_array(int virtual_tx, int virtual_rx, int num_tx, int num_rx, ArrayMode mode,
                         std::uint64_t seed = 0);

/// f_m = base + m * spacing. Throws when spacing < bandwidth (overlapping bands).
std::vector<double> fdma_carriers(int num_tx, double base_hz, double spacing_hz, double bandwidth_hz);

/// Sorted virtual positions zeta_q + xi_m over all channels.
std::vector<double> virtual_positions(const ArrayGeometry& array);

/// beta_mq for every channel, [M x Q].
RMatrix beta_matrix(const ArrayGeometry& array, double carrier_hz, bool exact = true);

/// Doppler bin of a slow-time frequency fD (Hz) in the target convention:
/// e^{j 2 pi fD p pri} = e^{-j 2 pi r p / P} at r = round(-fD P pri) mod P.
int mimo_doppler_bin(double doppler_hz, const RadarParams& params);
double mimo_doppler_hz(int bin, const RadarParams& params);

/// Azimuth bin u on the T R point sine grid, sine = 2u / (T R) wrapped to [-1, 1).
int azimuth_bin(double azimuth_sine, int azimuth_bins);

/// 2-norm condition number of the channel steering matrix e^{j 2 pi beta_mq theta_l}.
double steering_condition(const ArrayGeometry& array, const std::vector<double>& azimuth_sines, double carrier_hz,
                          bool exact = true);

struct MimoOptions {
  /// Keep the f_m lambda / c term in beta.
  bool exact_beta = true;
  bool refit = true;
  bool polish = true;
  double tol = -1.0;
  /// Sparsest exact fit per Doppler bin when the greedy stage leaves a
  /// residual above tol (noiseless data).
  bool exact_search = false;
  long long search_budget = 200000;
};

/// Joint delay, azimuth and Doppler recovery. Every channel is Doppler
/// focused; the statistic sums the per-channel delay correlations coherently
/// with steering e^{-j 2 pi beta_mq theta}. The azimuth grid has T R points.
RecoveryResult recover_mimo(const XampleSet& x, const ArrayGeometry& array, const std::vector<PulseSpectrum>& spectra,
                            int num_targets, const MimoOptions& options = {});

}  // namespace xradar
