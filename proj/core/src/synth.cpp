#include "xradar/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "xradar/fft.hpp"

namespace xradar {

std::string to_string(ScheduleMode mode) {
  switch (mode) {
    case ScheduleMode::uniform: return "uniform";
    case ScheduleMode::nonuniform: return "nonuniform";
    case ScheduleMode::phase_coded: return "phase_coded";
  }
  return "uniform";
}

ScheduleMode schedule_mode_from_string(const std::string& name) {
  if (name == "uniform") return ScheduleMode::uniform;
  if (name == "nonuniform") return ScheduleMode::nonuniform;
  if (name == "phase_coded") return ScheduleMode::phase_coded;
  throw std::invalid_argument("unknown schedule mode '" + name + "'");
}

PulseSchedule PulseSchedule::uniform(int num_pulses) {
  if (num_pulses < 1) throw std::invalid_argument("PulseSchedule: at least one pulse required");
  PulseSchedule s;
  s.mode = ScheduleMode::uniform;
  s.num_slots = num_pulses;
  s.slots.resize(static_cast<std::size_t>(num_pulses));
  for (int p = 0; p < num_pulses; ++p) s.slots[static_cast<std::size_t>(p)] = p;
  return s;
}

PulseSchedule PulseSchedule::nonuniform(int num_slots, std::vector<int> slots) {
  PulseSchedule s;
  s.mode = ScheduleMode::nonuniform;
  s.num_slots = num_slots;
  s.slots = std::move(slots);
  s.validate();
  return s;
}

PulseSchedule PulseSchedule::random_nonuniform(int num_slots, int num_pulses, Rng& rng) {
  if (num_pulses < 1 || num_pulses > num_slots)
    throw std::invalid_argument("PulseSchedule: need 1 <= M <= P transmitted pulses");
  return nonuniform(num_slots, rng.sample_sorted(num_slots, num_pulses));
}

PulseSchedule PulseSchedule::phase_coded(std::vector<double> phases, int ambiguity_factor) {
  PulseSchedule s = uniform(static_cast<int>(phases.size()));
  s.mode = ScheduleMode::phase_coded;
  s.phases = std::move(phases);
  s.ambiguity_factor = ambiguity_factor;
  s.validate();
  return s;
}

PulseSchedule PulseSchedule::random_phase_coded(int num_pulses, int ambiguity_factor, Rng& rng) {
  if (num_pulses < 1) throw std::invalid_argument("PulseSchedule: at least one pulse required");
  std::vector<double> phases(static_cast<std::size_t>(num_pulses));
  for (double& c : phases) c = rng.uniform(0.0, kTwoPi);
  return phase_coded(std::move(phases), ambiguity_factor);
}

int PulseSchedule::num_frames() const {
  if (mode == ScheduleMode::phase_coded) return num_transmitted() + ambiguity_factor - 1;
  return num_transmitted();
}

int PulseSchedule::frame_time(int frame) const {
  if (mode == ScheduleMode::phase_coded) return frame;
  return slots[static_cast<std::size_t>(frame)];
}

void PulseSchedule::validate() const {
  if (num_slots < 1) throw std::invalid_argument("PulseSchedule: num_slots must be >= 1");
  if (slots.empty()) throw std::invalid_argument("PulseSchedule: no pulses");
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i] < 0 || slots[i] >= num_slots) throw std::invalid_argument("PulseSchedule: slot outside the CPI");
    if (i > 0 && slots[i] <= slots[i - 1]) throw std::invalid_argument("PulseSchedule: slots must be strictly increasing");
  }
  if (ambiguity_factor < 1) throw std::invalid_argument("PulseSchedule: ambiguity factor must be >= 1");
  switch (mode) {
    case ScheduleMode::uniform:
      if (num_transmitted() != num_slots) throw std::invalid_argument("PulseSchedule: uniform mode sends every slot");
      [[fallthrough]];
    case ScheduleMode::nonuniform:
      if (!phases.empty()) throw std::invalid_argument("PulseSchedule: phases are only used in phase-coded mode");
      if (ambiguity_factor != 1) throw std::invalid_argument("PulseSchedule: ambiguity factor requires phase coding");
      break;
    case ScheduleMode::phase_coded:
      if (phases.size() != slots.size()) throw std::invalid_argument("PulseSchedule: one phase per pulse required");
      if (num_transmitted() != num_slots) throw std::invalid_argument("PulseSchedule: phase-coded trains are uniform");
      if (ambiguity_factor >= num_transmitted())
        throw std::invalid_argument("PulseSchedule: ambiguity factor must be smaller than the pulse count");
      break;
  }
}

std::string to_string(BandStrategy strategy) {
  switch (strategy) {
    case BandStrategy::full: return "full";
    case BandStrategy::random: return "random";
    case BandStrategy::consecutive: return "consecutive";
    case BandStrategy::multiband: return "multiband";
    case BandStrategy::custom: return "custom";
  }
  return "custom";
}

BandStrategy band_strategy_from_string(const std::string& name) {
  if (name == "full") return BandStrategy::full;
  if (name == "random") return BandStrategy::random;
  if (name == "consecutive") return BandStrategy::consecutive;
  if (name == "multiband") return BandStrategy::multiband;
  if (name == "custom") return BandStrategy::custom;
  throw std::invalid_argument("unknown band strategy '" + name + "'");
}

BandSelection BandSelection::full(int num_bins) {
  if (num_bins < 1) throw std::invalid_argument("BandSelection: num_bins must be >= 1");
  BandSelection b;
  b.num_bins = num_bins;
  b.strategy = BandStrategy::full;
  b.kappa.resize(static_cast<std::size_t>(num_bins));
  for (int k = 0; k < num_bins; ++k) b.kappa[static_cast<std::size_t>(k)] = k;
  return b;
}

BandSelection BandSelection::random(int num_bins, int count, Rng& rng) {
  if (count < 1 || count > num_bins) throw std::invalid_argument("BandSelection: need 1 <= K <= N");
  BandSelection b;
  b.num_bins = num_bins;
  b.strategy = BandStrategy::random;
  b.kappa = rng.sample_sorted(num_bins, count);
  return b;
}

BandSelection BandSelection::consecutive(int num_bins, int count, int start) {
  if (count < 1 || count > num_bins) throw std::invalid_argument("BandSelection: need 1 <= K <= N");
  if (start < 0 || start + count > num_bins) throw std::invalid_argument("BandSelection: band exceeds [0, N)");
  BandSelection b;
  b.num_bins = num_bins;
  b.strategy = BandStrategy::consecutive;
  for (int k = 0; k < count; ++k) b.kappa.push_back(start + k);
  return b;
}

BandSelection BandSelection::multiband(int num_bins, int count, int groups, Rng& rng) {
  if (count < 1 || count > num_bins) throw std::invalid_argument("BandSelection: need 1 <= K <= N");
  if (groups < 1 || groups > count) throw std::invalid_argument("BandSelection: need 1 <= groups <= K");
  // Stars and bars: the free bins are split into groups + 1 random gaps.
  const int slack = num_bins - count;
  const std::vector<int> marks = rng.sample_sorted(slack + groups, groups);
  BandSelection b;
  b.num_bins = num_bins;
  b.strategy = BandStrategy::multiband;
  b.groups = groups;
  int used = 0;
  for (int g = 0; g < groups; ++g) {
    const int len = count / groups + (g < count % groups ? 1 : 0);
    const int start = marks[static_cast<std::size_t>(g)] - g + used;
    for (int k = 0; k < len; ++k) b.kappa.push_back(start + k);
    used += len;
  }
  return b;
}

BandSelection BandSelection::custom(int num_bins, std::vector<int> indices) {
  BandSelection b;
  b.num_bins = num_bins;
  b.strategy = BandStrategy::custom;
  b.kappa = std::move(indices);
  b.validate();
  return b;
}

void BandSelection::validate() const {
  if (num_bins < 1) throw std::invalid_argument("BandSelection: num_bins must be >= 1");
  if (kappa.empty()) throw std::invalid_argument("BandSelection: empty selection");
  for (std::size_t i = 0; i < kappa.size(); ++i) {
    if (kappa[i] < 0 || kappa[i] >= num_bins) throw std::invalid_argument("BandSelection: index outside [0, N)");
    if (i > 0 && kappa[i] <= kappa[i - 1]) throw std::invalid_argument("BandSelection: indices must be sorted and unique");
  }
}

const BandSelection& XampleSet::selection(int channel) const {
  if (tx_kappa.empty()) return kappa;
  return tx_kappa[static_cast<std::size_t>(channel / num_rx)];
}

void XampleSet::validate() const {
  schedule.validate();
  if (channels.empty()) throw std::invalid_argument("XampleSet: no channels");
  if (num_rx < 1 || num_channels() % num_rx != 0) throw std::invalid_argument("XampleSet: bad receiver count");
  if (!tx_kappa.empty() && static_cast<int>(tx_kappa.size()) * num_rx != num_channels())
    throw std::invalid_argument("XampleSet: one selection per transmitter required");
  for (int ch = 0; ch < num_channels(); ++ch) {
    const BandSelection& sel = selection(ch);
    sel.validate();
    if (sel.num_bins != params.num_nyquist_bins) throw std::invalid_argument("XampleSet: selection size mismatch");
    const CMatrix& c = channels[static_cast<std::size_t>(ch)];
    if (c.rows() != schedule.num_frames() || c.cols() != sel.size())
      throw std::invalid_argument("XampleSet: channel " + std::to_string(ch) + " has the wrong shape");
  }
}

namespace {

void check_spectrum(const PulseSpectrum& spectrum, const RadarParams& params) {
  if (spectrum.size() != params.num_nyquist_bins)
    throw std::invalid_argument("pulse spectrum length must equal the Nyquist bin count");
}

struct FoldedTarget {
  double delay_cycles;  // tau_l / pri, folded into [0, 1)
  int order;            // ambiguity order q_l
};

FoldedTarget fold_target(const Target& t, const RadarParams& params, const PulseSchedule& schedule, std::size_t i) {
  const double ratio = t.delay_s / params.pri_s;
  const int q_max = schedule.mode == ScheduleMode::phase_coded ? schedule.ambiguity_factor : 1;
  if (ratio < 0.0 || ratio >= q_max)
    throw std::invalid_argument("target " + std::to_string(i) + " delay outside the unambiguous range of the schedule");
  if (t.amplitude == Complex(0.0)) throw std::invalid_argument("target " + std::to_string(i) + " has zero amplitude");
  const int order = static_cast<int>(std::floor(ratio));
  return {ratio - order, order};
}

// Coefficients for every frame over the indices in `bins`.
CMatrix synthesize(const TargetScene& scene, const RadarParams& params, const PulseSpectrum& spectrum,
                   const PulseSchedule& schedule, const std::vector<int>& bins) {
  schedule.validate();
  check_spectrum(spectrum, params);
  if (schedule.num_slots != params.num_pulses)
    throw std::invalid_argument("schedule length must equal params.num_pulses");

  const int frames = schedule.num_frames();
  const Index k_count = static_cast<Index>(bins.size());
  CMatrix c = CMatrix::Zero(frames, k_count);
  const double inv_pri = 1.0 / params.pri_s;

  for (std::size_t i = 0; i < scene.targets.size(); ++i) {
    const Target& t = scene.targets[i];
    const FoldedTarget ft = fold_target(t, params, schedule, i);
    CVector delay_row(k_count);
    for (Index j = 0; j < k_count; ++j) {
      const int k = bins[static_cast<std::size_t>(j)];
      // k * tau / pri reduced modulo 1 through the integer part of k.
      delay_row(j) = inv_pri * spectrum.coeffs(k) * unit_phasor(-std::fmod(k * ft.delay_cycles, 1.0));
    }
    const double doppler_cycles = t.doppler_rad_s * params.pri_s / kTwoPi;
    for (int p = 0; p < schedule.num_transmitted(); ++p) {
      int frame = p;
      Complex code{1.0, 0.0};
      if (schedule.mode == ScheduleMode::phase_coded) {
        frame = p + ft.order;
        const double phase = schedule.phases[static_cast<std::size_t>(p)];
        if (phase != 0.0) code = std::polar(1.0, phase);
      }
      const int time = schedule.frame_time(frame);
      const Complex weight = t.amplitude * code * unit_phasor(-std::fmod(doppler_cycles * time, 1.0));
      c.row(frame) += weight * delay_row.transpose();
    }
  }
  return c;
}

}  // namespace

XampleSet fourier_coeffs(const TargetScene& scene, const RadarParams& params, const PulseSpectrum& spectrum,
                         const PulseSchedule& schedule, const BandSelection& kappa) {
  kappa.validate();
  if (kappa.num_bins != params.num_nyquist_bins) throw std::invalid_argument("fourier_coeffs: selection size mismatch");
  XampleSet x;
  x.params = params;
  x.schedule = schedule;
  x.kappa = kappa;
  x.channels.push_back(synthesize(scene, params, spectrum, schedule, kappa.kappa));
  return x;
}

CMatrix nyquist_time_samples(const TargetScene& scene, const RadarParams& params, const PulseSpectrum& spectrum,
                             const PulseSchedule& schedule) {
  const BandSelection all = BandSelection::full(params.num_nyquist_bins);
  return fft::inverse_unscaled_rows(synthesize(scene, params, spectrum, schedule, all.kappa));
}

double mean_power(const XampleSet& x) {
  double total = 0.0;
  Index count = 0;
  for (const CMatrix& c : x.channels) {
    total += c.squaredNorm();
    count += c.size();
  }
  return count > 0 ? total / static_cast<double>(count) : 0.0;
}

XampleSet add_noise(const XampleSet& x, double snr_db, std::uint64_t seed) {
  if (std::isinf(snr_db) && snr_db > 0.0) return x;
  if (std::isnan(snr_db)) throw std::invalid_argument("add_noise: SNR is NaN");
  const double power = mean_power(x);
  if (power == 0.0) throw std::invalid_argument("add_noise: signal power is zero, SNR undefined");
  const double variance = power * std::pow(10.0, -snr_db / 10.0);
  XampleSet out = x;
  for (std::size_t ch = 0; ch < out.channels.size(); ++ch) {
    Rng rng(Rng::derive(seed, {static_cast<std::uint64_t>(ch)}));
    CMatrix& c = out.channels[ch];
    // Column-major walk fixes the draw order independently of the storage.
    for (Index j = 0; j < c.cols(); ++j)
      for (Index i = 0; i < c.rows(); ++i) c(i, j) += rng.complex_normal(variance);
  }
  return out;
}

CVector sfr_phase_detector(const TargetScene& scene, double f0_hz, double delta_f_hz, int num_pulses, double pri_s) {
  if (num_pulses < 1) throw std::invalid_argument("sfr_phase_detector: at least one pulse required");
  if (!(pri_s > 0.0)) throw std::invalid_argument("sfr_phase_detector: pri must be positive");
  CVector y = CVector::Zero(num_pulses);
  for (const Target& t : scene.targets) {
    for (int p = 0; p < num_pulses; ++p) {
      const double fp = f0_hz + p * delta_f_hz;
      const double cycles = std::fmod(fp * t.delay_s, 1.0) + std::fmod(t.doppler_rad_s * p * pri_s / kTwoPi, 1.0);
      y(p) += t.amplitude * unit_phasor(cycles);
    }
  }
  return y;
}

XampleSet mimo_fourier_coeffs(const MimoScene& scene, const RadarParams& params, const ArrayGeometry& array,
                              const std::vector<PulseSpectrum>& spectra, const std::vector<BandSelection>& tx_kappa,
                              bool exact_beta) {
  array.validate();
  const int m_count = array.num_tx();
  const int q_count = array.num_rx();
  if (static_cast<int>(spectra.size()) != m_count)
    throw std::invalid_argument("mimo_fourier_coeffs: one spectrum per transmitter required");
  if (tx_kappa.size() != 1 && static_cast<int>(tx_kappa.size()) != m_count)
    throw std::invalid_argument("mimo_fourier_coeffs: give one shared selection or one per transmitter");
  for (const auto& s : spectra) check_spectrum(s, params);
  for (const auto& sel : tx_kappa) {
    sel.validate();
    if (sel.num_bins != params.num_nyquist_bins) throw std::invalid_argument("mimo_fourier_coeffs: selection size mismatch");
    if (sel.size() != tx_kappa.front().size())
      throw std::invalid_argument("mimo_fourier_coeffs: all transmitters must keep the same number of coefficients");
  }

  XampleSet x;
  x.params = params;
  x.schedule = PulseSchedule::uniform(params.num_pulses);
  x.kappa = tx_kappa.front();
  if (tx_kappa.size() > 1) x.tx_kappa = tx_kappa;
  x.num_rx = q_count;

  const int pulses = params.num_pulses;
  const double inv_pri = 1.0 / params.pri_s;
  for (int m = 0; m < m_count; ++m) {
    const BandSelection& sel = tx_kappa.size() > 1 ? tx_kappa[static_cast<std::size_t>(m)] : tx_kappa.front();
    const PulseSpectrum& h = spectra[static_cast<std::size_t>(m)];
    for (int q = 0; q < q_count; ++q) {
      CMatrix c = CMatrix::Zero(pulses, sel.size());
      const double beta = array.beta(m, q, params.carrier_hz, exact_beta);
      for (std::size_t i = 0; i < scene.targets.size(); ++i) {
        const MimoTarget& t = scene.targets[i];
        const double ratio = t.delay_s / params.pri_s;
        if (ratio < 0.0 || ratio >= 1.0)
          throw std::invalid_argument("mimo target " + std::to_string(i) + " delay outside [0, pri)");
        if (t.azimuth_sine < -1.0 || t.azimuth_sine > 1.0)
          throw std::invalid_argument("mimo target " + std::to_string(i) + " azimuth sine outside [-1, 1]");
        const Complex steer = t.amplitude * unit_phasor(std::fmod(beta * t.azimuth_sine, 1.0));
        CVector delay_row(sel.size());
        for (int j = 0; j < sel.size(); ++j) {
          const int k = sel.kappa[static_cast<std::size_t>(j)];
          delay_row(j) = inv_pri * h.coeffs(k) * unit_phasor(-std::fmod(k * ratio, 1.0));
        }
        const double doppler_cycles = t.doppler_hz * params.pri_s;
        for (int p = 0; p < pulses; ++p)
          c.row(p) += steer * unit_phasor(std::fmod(doppler_cycles * p, 1.0)) * delay_row.transpose();
      }
      x.channels.push_back(std::move(c));
    }
  }
  return x;
}

}  // namespace xradar
