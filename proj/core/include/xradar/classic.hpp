#pragma once

#include "xradar/recovery.hpp"
#include "xradar/synth.hpp"
#include "xradar/waveforms.hpp"

namespace xradar {

/// Delay-Doppler map; row = raw DFT Doppler bin, column = delay bin.
struct DelayDopplerMap {
  CMatrix values;
  RMatrix magnitudes;
  double delay_step_s = 0.0;
  double doppler_step_rad_s = 0.0;

  int doppler_bins() const { return static_cast<int>(values.rows()); }
  int delay_bins() const { return static_cast<int>(values.cols()); }
};

/// Per-frame circular correlation with the pulse: Y_p[k] = X_p[k] conj(H[k]).
/// frames is P x N.
CMatrix matched_filter(const CMatrix& frames, const CVector& pulse_samples);

/// z_n[k] = sum_p y_p[n] e^{-j 2 pi p k / P}.
DelayDopplerMap doppler_dft(const CMatrix& mf_out, double delay_step_s = 0.0, double doppler_step_rad_s = 0.0);

/// Raw map bin of a target with Doppler index r, and the inverse mapping.
/// The slow-time DFT sees e^{-j 2 pi r p / P} at bin (-r mod P).
int resign_doppler_bin(int bin, int num_bins);

/// Top-L cells of the map by magnitude; equal magnitudes resolve to the lower
/// delay bin, then the lower raw Doppler bin. Amplitude = value / gain.
/// Returned Doppler bins are raw map bins.
RecoveryResult detect_peaks(const DelayDopplerMap& map, int num_targets, double processing_gain = 1.0);

/// P * sum|H|^2 / pri: peak value of a unit on-grid target after MF and DFT.
double classic_processing_gain(const PulseSpectrum& spectrum, int num_pulses, double pri_s);

/// Matched filter, slow-time DFT and top-L detection on Nyquist frames;
/// Doppler bins are re-signed to the target convention.
RecoveryResult classic_recover(const CMatrix& frames, const PulseSpectrum& spectrum, double pri_s, int num_targets);

/// Classic processing of compressed data: missing Fourier coefficients are
/// zero-filled, missing pulses are zero frames.
RecoveryResult classic_from_xamples(const XampleSet& x, const PulseSpectrum& spectrum, int num_targets);

/// Time-domain frames rebuilt from (possibly zero-filled) coefficients, P x N.
CMatrix frames_from_xamples(const XampleSet& x, int channel = 0);

struct SfrGrid {
  double f0_hz = 0.0;
  double delta_f_hz = 0.0;
  double pri_s = 0.0;
  /// Delay step 1 / (delay_bins * delta_f) covers the unambiguous 1 / delta_f.
  int delay_bins = 0;
  /// Doppler step 2 pi / (doppler_bins * pri). Delay and Doppler both enter
  /// as a linear phase in p, so more than one Doppler bin gives a coherent
  /// dictionary.
  int doppler_bins = 1;

  double delay_step_s() const { return 1.0 / (delay_bins * delta_f_hz); }
  double doppler_step_rad_s() const { return kTwoPi / (doppler_bins * pri_s); }
};

/// Columns e^{j 2 pi f_p tau_i} e^{j nu_k p pri}, column index k * delay_bins + i.
CMatrix sfr_dictionary(const SfrGrid& grid, int num_pulses);

/// Greedy (OMP) recovery over the SFR dictionary. Stops after num_targets
/// atoms or when the residual drops below tol (negative: 1e-9 ||y||).
RecoveryResult sfr_dft_recover(const CVector& y, const SfrGrid& grid, int num_targets, double tol = -1.0);

}  // namespace xradar
