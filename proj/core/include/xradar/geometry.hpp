#pragma once

#include <vector>

#include "xradar/types.hpp"

namespace xradar {

/// Collocated MIMO array. Positions are in wavelengths (a half-wavelength
/// spaced ULA has rx positions q/2). The virtual aperture is Z = T R / 2.
struct ArrayGeometry {
  std::vector<double> tx_positions;
  std::vector<double> rx_positions;
  int virtual_tx = 1;
  int virtual_rx = 1;
  /// FDMA carrier offset of each transmitter, Hz.
  std::vector<double> carriers_hz;

  int num_tx() const { return static_cast<int>(tx_positions.size()); }
  int num_rx() const { return static_cast<int>(rx_positions.size()); }
  int num_channels() const { return num_tx() * num_rx(); }
  double aperture() const { return 0.5 * virtual_tx * virtual_rx; }
  int azimuth_bins() const { return virtual_tx * virtual_rx; }

  /// Channel index of (tx m, rx q); channels are stored (m, q) row-major.
  int channel(int m, int q) const { return m * num_rx() + q; }

  /// beta_mq = (zeta_q + xi_m)(f_m lambda / c + 1), lambda = c / carrier.
  /// With exact == false the carrier correction is dropped.
  double beta(int m, int q, double carrier_hz, bool exact = true) const;

  /// Throws std::invalid_argument on positions outside [0, Z] or a carrier
  /// count that does not match the transmitter count.
  void validate() const;
};

struct MimoTarget {
  double delay_s = 0.0;
  double azimuth_sine = 0.0;
  /// Slow-time Doppler in Hz; pulse p carries e^{+j 2 pi f_D p pri}.
  double doppler_hz = 0.0;
  Complex amplitude{1.0, 0.0};
};

struct MimoScene {
  std::vector<MimoTarget> targets;
};

}  // namespace xradar
