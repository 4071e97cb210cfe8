#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xradar/geometry.hpp"
#include "xradar/model.hpp"
#include "xradar/rng.hpp"
#include "xradar/waveforms.hpp"

namespace xradar {

enum class ScheduleMode { uniform, nonuniform, phase_coded };

std::string to_string(ScheduleMode mode);
ScheduleMode schedule_mode_from_string(const std::string& name);

/// Slow-time layout of one CPI of num_slots PRIs.
///  uniform:     pulse p sent in slot p, P frames.
///  nonuniform:  M pulses sent in sorted slots m_p, M frames.
///  phase_coded: P pulses with phases c[p]; echoes with ambiguity order up to
///               Q - 1 arrive, so P + Q - 1 frames are recorded.
struct PulseSchedule {
  ScheduleMode mode = ScheduleMode::uniform;
  int num_slots = 0;
  std::vector<int> slots;
  std::vector<double> phases;
  int ambiguity_factor = 1;

  static PulseSchedule uniform(int num_pulses);
  static PulseSchedule nonuniform(int num_slots, std::vector<int> slots);
  /// M slots drawn without replacement from [0, num_slots), sorted.
  static PulseSchedule random_nonuniform(int num_slots, int num_pulses, Rng& rng);
  static PulseSchedule phase_coded(std::vector<double> phases, int ambiguity_factor);
  /// Phases i.i.d. uniform on [0, 2 pi).
  static PulseSchedule random_phase_coded(int num_pulses, int ambiguity_factor, Rng& rng);

  int num_transmitted() const { return static_cast<int>(slots.size()); }
  int num_frames() const;
  /// Slow-time index multiplying nu * pri in frame f.
  int frame_time(int frame) const;

  void validate() const;
};

enum class BandStrategy { full, random, consecutive, multiband, custom };

std::string to_string(BandStrategy strategy);
BandStrategy band_strategy_from_string(const std::string& name);

/// Selected Fourier-coefficient indices kappa, sorted and unique.
struct BandSelection {
  int num_bins = 0;
  std::vector<int> kappa;
  BandStrategy strategy = BandStrategy::full;
  int groups = 0;

  static BandSelection full(int num_bins);
  static BandSelection random(int num_bins, int count, Rng& rng);
  static BandSelection consecutive(int num_bins, int count, int start = 0);
  /// `groups` runs of consecutive indices at random non-overlapping offsets;
  /// run lengths differ by at most one.
  static BandSelection multiband(int num_bins, int count, int groups, Rng& rng);
  static BandSelection custom(int num_bins, std::vector<int> indices);

  int size() const { return static_cast<int>(kappa.size()); }
  void validate() const;
};

/// Compressed measurements: one frames x K matrix per channel.
struct XampleSet {
  RadarParams params;
  PulseSchedule schedule;
  BandSelection kappa;
  /// Per-transmitter selections for MIMO; empty means every channel uses kappa.
  std::vector<BandSelection> tx_kappa;
  int num_rx = 1;
  std::vector<CMatrix> channels;

  int num_channels() const { return static_cast<int>(channels.size()); }
  int num_frames() const { return channels.empty() ? 0 : static_cast<int>(channels.front().rows()); }
  int num_coeffs() const { return channels.empty() ? 0 : static_cast<int>(channels.front().cols()); }
  const BandSelection& selection(int channel) const;
  void validate() const;
};

/// c_f[k] = (1/pri) H[k] sum_l alpha_l e^{-j 2 pi k tau_l / pri} e^{-j nu_l t_f pri} for k in kappa.
/// In phase-coded mode a target at delay tau_l + q_l pri and pulse p lands
/// in frame p + q_l with the extra factor e^{j c[p]}.
XampleSet fourier_coeffs(const TargetScene& scene, const RadarParams& params, const PulseSpectrum& spectrum,
                         const PulseSchedule& schedule, const BandSelection& kappa);

/// Nyquist-rate samples x_f[n] = sum_k c_f[k] e^{j 2 pi k n / N} over all N bins,
/// one row per frame.
CMatrix nyquist_time_samples(const TargetScene& scene, const RadarParams& params, const PulseSpectrum& spectrum,
                             const PulseSchedule& schedule);

/// Add circular complex Gaussian noise with variance mean|c|^2 * 10^{-snr/10}.
/// Channel ch draws from the stream derived from (seed, ch). An infinite SNR
/// returns the input unchanged.
XampleSet add_noise(const XampleSet& x, double snr_db, std::uint64_t seed);

/// Mean per-coefficient power over all channels.
double mean_power(const XampleSet& x);

/// y_p = sum_l alpha_l e^{j 2 pi f_p tau_l} e^{j nu_l p pri}, f_p = f0 + p delta_f.
CVector sfr_phase_detector(const TargetScene& scene, double f0_hz, double delta_f_hz, int num_pulses,
                           double pri_s);

/// Multichannel coefficients, channel (m, q) at index m * Q + q:
/// (1/pri) H_m[k] sum_l alpha_l e^{-j 2 pi k tau_l / pri} e^{j 2 pi beta_mq theta_l}
/// e^{j 2 pi fD_l p pri}. tx_kappa holds one selection per transmitter, or a
/// single selection shared by all of them.
XampleSet mimo_fourier_coeffs(const MimoScene& scene, const RadarParams& params, const ArrayGeometry& array,
                              const std::vector<PulseSpectrum>& spectra, const std::vector<BandSelection>& tx_kappa,
                              bool exact_beta = true);

}  // namespace xradar
