#include "xradar/classic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "xradar/cs.hpp"
#include "xradar/fft.hpp"

namespace xradar {

CMatrix matched_filter(const CMatrix& frames, const CVector& pulse_samples) {
  if (frames.cols() != pulse_samples.size())
    throw std::invalid_argument("matched_filter: frame length " + std::to_string(frames.cols()) +
                                " does not match pulse length " + std::to_string(pulse_samples.size()));
  const CVector h = fft::forward(pulse_samples).conjugate();
  CMatrix spectra = fft::forward_rows(frames);
  spectra.array().rowwise() *= h.transpose().array();
  return fft::inverse_unscaled_rows(spectra) / static_cast<double>(frames.cols());
}

DelayDopplerMap doppler_dft(const CMatrix& mf_out, double delay_step_s, double doppler_step_rad_s) {
  if (mf_out.rows() < 1) throw std::invalid_argument("doppler_dft: at least one pulse required");
  DelayDopplerMap map;
  map.values = fft::forward_columns(mf_out);
  map.magnitudes = map.values.cwiseAbs();
  map.delay_step_s = delay_step_s;
  map.doppler_step_rad_s = doppler_step_rad_s;
  return map;
}

int resign_doppler_bin(int bin, int num_bins) { return ((num_bins - bin) % num_bins + num_bins) % num_bins; }

RecoveryResult detect_peaks(const DelayDopplerMap& map, int num_targets, double processing_gain) {
  const Index cells = map.values.size();
  if (num_targets < 1) throw std::invalid_argument("detect_peaks: L must be >= 1");
  if (num_targets > cells) throw std::invalid_argument("detect_peaks: L exceeds the number of map cells");
  if (!(processing_gain > 0.0)) throw std::invalid_argument("detect_peaks: processing gain must be positive");

  const int rows = map.doppler_bins();
  const int cols = map.delay_bins();
  // Enumerate delay-major so a stable sort keeps (delay, Doppler) order on ties.
  std::vector<Index> order(static_cast<std::size_t>(cells));
  for (int n = 0; n < cols; ++n)
    for (int k = 0; k < rows; ++k) order[static_cast<std::size_t>(n * rows + k)] = n * rows + k;
  const auto mag = [&](Index id) { return map.magnitudes(id % rows, id / rows); };
  std::partial_sort(order.begin(), order.begin() + num_targets, order.end(), [&](Index a, Index b) {
    const double ma = mag(a);
    const double mb = mag(b);
    return ma != mb ? ma > mb : a < b;
  });

  RecoveryResult out;
  for (int i = 0; i < num_targets; ++i) {
    const Index id = order[static_cast<std::size_t>(i)];
    Detection d;
    d.doppler_bin = static_cast<int>(id % rows);
    d.delay_bin = static_cast<int>(id / rows);
    d.amplitude = map.values(d.doppler_bin, d.delay_bin) / processing_gain;
    out.detections.push_back(d);
  }
  return out;
}

double classic_processing_gain(const PulseSpectrum& spectrum, int num_pulses, double pri_s) {
  return num_pulses * spectrum.energy() / pri_s;
}

namespace {

RecoveryResult recover_from_frames(const CMatrix& frames, const PulseSpectrum& spectrum, double gain, int num_targets) {
  const CMatrix mf = matched_filter(frames, pulse_samples(spectrum));
  RecoveryResult r = detect_peaks(doppler_dft(mf), num_targets, gain);
  for (Detection& d : r.detections) d.doppler_bin = resign_doppler_bin(d.doppler_bin, static_cast<int>(frames.rows()));
  return r;
}

}  // namespace

RecoveryResult classic_recover(const CMatrix& frames, const PulseSpectrum& spectrum, double pri_s, int num_targets) {
  return recover_from_frames(frames, spectrum, classic_processing_gain(spectrum, static_cast<int>(frames.rows()), pri_s),
                             num_targets);
}

CMatrix frames_from_xamples(const XampleSet& x, int channel) {
  if (x.schedule.mode == ScheduleMode::phase_coded)
    throw std::invalid_argument("frames_from_xamples: phase-coded trains need the phase-coded receiver");
  const BandSelection& sel = x.selection(channel);
  const CMatrix& c = x.channels.at(static_cast<std::size_t>(channel));
  const int n = x.params.num_nyquist_bins;
  CMatrix spectra = CMatrix::Zero(x.schedule.num_slots, n);
  for (int f = 0; f < x.schedule.num_frames(); ++f) {
    const int row = x.schedule.frame_time(f);
    for (int j = 0; j < sel.size(); ++j) spectra(row, sel.kappa[static_cast<std::size_t>(j)]) = c(f, j);
  }
  return fft::inverse_unscaled_rows(spectra);
}

RecoveryResult classic_from_xamples(const XampleSet& x, const PulseSpectrum& spectrum, int num_targets) {
  const CMatrix frames = frames_from_xamples(x);
  double kept = 0.0;
  for (int k : x.kappa.kappa) kept += std::norm(spectrum.coeffs(k));
  if (kept == 0.0) throw std::invalid_argument("classic_from_xamples: pulse has no energy on the selected band");
  const double gain = x.schedule.num_transmitted() * kept / x.params.pri_s;
  return recover_from_frames(frames, spectrum, gain, num_targets);
}

CMatrix sfr_dictionary(const SfrGrid& grid, int num_pulses) {
  if (grid.delay_bins < 1 || grid.doppler_bins < 1) throw std::invalid_argument("SfrGrid: empty grid");
  if (!(grid.delta_f_hz > 0.0) || !(grid.pri_s > 0.0)) throw std::invalid_argument("SfrGrid: step and pri must be positive");
  CMatrix phi(num_pulses, static_cast<Index>(grid.delay_bins) * grid.doppler_bins);
  for (int k = 0; k < grid.doppler_bins; ++k) {
    for (int i = 0; i < grid.delay_bins; ++i) {
      const double tau = i * grid.delay_step_s();
      for (int p = 0; p < num_pulses; ++p) {
        const double fp = grid.f0_hz + p * grid.delta_f_hz;
        const double cycles = std::fmod(fp * tau, 1.0) + static_cast<double>(k) * p / grid.doppler_bins;
        phi(p, static_cast<Index>(k) * grid.delay_bins + i) = unit_phasor(cycles);
      }
    }
  }
  return phi;
}

RecoveryResult sfr_dft_recover(const CVector& y, const SfrGrid& grid, int num_targets, double tol) {
  if (y.size() < 1) throw std::invalid_argument("sfr_dft_recover: empty input");
  if (num_targets < 1) throw std::invalid_argument("sfr_dft_recover: L must be >= 1");
  const cs::DenseOperator phi(sfr_dictionary(grid, static_cast<int>(y.size())));
  cs::SparseProblem problem{phi, y, std::min<int>(num_targets, static_cast<int>(y.size())), tol};
  const cs::SparseSolution sol = cs::omp(problem);
  RecoveryResult out;
  for (std::size_t i = 0; i < sol.support.size(); ++i) {
    Detection d;
    d.delay_bin = static_cast<int>(sol.support[i] % grid.delay_bins);
    d.doppler_bin = static_cast<int>(sol.support[i] / grid.delay_bins);
    d.amplitude = sol.values(static_cast<Index>(i));
    out.detections.push_back(d);
  }
  out.residual_energy = sol.residual_norm * sol.residual_norm;
  out.iterations = sol.iterations;
  out.sort_by_magnitude();
  return out;
}

}  // namespace xradar
