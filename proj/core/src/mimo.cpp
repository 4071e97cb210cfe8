#include "xradar/mimo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pursuit.hpp"
#include "xradar/fft.hpp"
#include "xradar/rng.hpp"

namespace xradar {

ArrayGeometry make_array(int virtual_tx, int virtual_rx, int num_tx, int num_rx, ArrayMode mode, std::uint64_t seed) {
  if (virtual_tx < 1 || virtual_rx < 1) throw std::invalid_argument("make_array: T and R must be >= 1");
  if (num_tx < 1 || num_tx > virtual_tx) throw std::invalid_argument("make_array: need 1 <= M <= T");
  if (num_rx < 1 || num_rx > virtual_rx) throw std::invalid_argument("make_array: need 1 <= Q <= R");
  ArrayGeometry a;
  a.virtual_tx = virtual_tx;
  a.virtual_rx = virtual_rx;
  if (mode == ArrayMode::ula) {
    for (int m = 0; m < num_tx; ++m) a.tx_positions.push_back(0.5 * virtual_rx * m);
    for (int q = 0; q < num_rx; ++q) a.rx_positions.push_back(0.5 * q);
  } else {
    Rng rng(seed);
    const double z = a.aperture();
    for (int m = 0; m < num_tx; ++m) a.tx_positions.push_back(rng.uniform(0.0, z));
    for (int q = 0; q < num_rx; ++q) a.rx_positions.push_back(rng.uniform(0.0, z));
    std::sort(a.tx_positions.begin(), a.tx_positions.end());
    std::sort(a.rx_positions.begin(), a.rx_positions.end());
  }
  a.carriers_hz.assign(static_cast<std::size_t>(num_tx), 0.0);
  return a;
}

std::vector<double> fdma_carriers(int num_tx, double base_hz, double spacing_hz, double bandwidth_hz) {
  if (num_tx < 1) throw std::invalid_argument("fdma_carriers: need at least one transmitter");
  if (num_tx > 1 && spacing_hz < bandwidth_hz)
    throw std::invalid_argument("fdma_carriers: spacing below the waveform bandwidth makes the bands overlap");
  std::vector<double> f(static_cast<std::size_t>(num_tx));
  for (int m = 0; m < num_tx; ++m) f[static_cast<std::size_t>(m)] = base_hz + m * spacing_hz;
  return f;
}

std::vector<double> virtual_positions(const ArrayGeometry& array) {
  std::vector<double> v;
  for (double xi : array.tx_positions)
    for (double zeta : array.rx_positions) v.push_back(zeta + xi);
  std::sort(v.begin(), v.end());
  return v;
}

RMatrix beta_matrix(const ArrayGeometry& array, double carrier_hz, bool exact) {
  RMatrix b(array.num_tx(), array.num_rx());
  for (int m = 0; m < array.num_tx(); ++m)
    for (int q = 0; q < array.num_rx(); ++q) b(m, q) = array.beta(m, q, carrier_hz, exact);
  return b;
}

int mimo_doppler_bin(double doppler_hz, const RadarParams& params) {
  return quantize_index(-doppler_hz * params.num_pulses * params.pri_s, params.num_pulses);
}

double mimo_doppler_hz(int bin, const RadarParams& params) {
  int r = bin;
  if (2 * r > params.num_pulses) r -= params.num_pulses;
  return -r / (params.num_pulses * params.pri_s);
}

int azimuth_bin(double azimuth_sine, int azimuth_bins) {
  if (azimuth_bins <= 1) return 0;
  return quantize_index(azimuth_sine * azimuth_bins / 2.0, azimuth_bins);
}

double steering_condition(const ArrayGeometry& array, const std::vector<double>& azimuth_sines, double carrier_hz,
                          bool exact) {
  if (azimuth_sines.empty()) return 1.0;
  CMatrix s(array.num_channels(), static_cast<Index>(azimuth_sines.size()));
  for (int m = 0; m < array.num_tx(); ++m)
    for (int q = 0; q < array.num_rx(); ++q)
      for (std::size_t l = 0; l < azimuth_sines.size(); ++l)
        s(array.channel(m, q), static_cast<Index>(l)) =
            unit_phasor(std::fmod(array.beta(m, q, carrier_hz, exact) * azimuth_sines[l], 1.0));
  const Eigen::JacobiSVD<CMatrix> svd(s);
  const RVector sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  return smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
}

namespace {

// Atoms over (azimuth u, Doppler r, delay s), id = (u * P + r) * N + s. Channel
// (m, q) holds g_m[k] e^{-j 2 pi k s / N} e^{-j 2 pi r p / P} e^{j 2 pi beta_mq theta_u}.
class MimoDictionary final : public detail::GridDictionary {
 public:
  MimoDictionary(const XampleSet& x, std::vector<CVector> weights, RVector betas, int azimuth_bins)
      : weights_(std::move(weights)),
        betas_(std::move(betas)),
        channels_(x.num_channels()),
        pulses_(x.num_frames()),
        coeffs_(x.num_coeffs()),
        delay_bins_(x.params.num_nyquist_bins),
        azimuth_bins_(azimuth_bins) {
    for (int ch = 0; ch < channels_; ++ch) kappa_.push_back(x.selection(ch).kappa);
    const GridSpec grid{delay_bins_, pulses_, azimuth_bins_, 1};
    steering_.resize(azimuth_bins_, channels_);
    for (int u = 0; u < azimuth_bins_; ++u) {
      const double sine = azimuth_bins_ > 1 ? grid.azimuth_sine(u) : 0.0;
      for (int ch = 0; ch < channels_; ++ch) steering_(u, ch) = unit_phasor(std::fmod(betas_(ch) * sine, 1.0));
    }
    for (int ch = 0; ch < channels_; ++ch) norm_sq_ += pulses_ * weights_[static_cast<std::size_t>(ch)].squaredNorm();
  }

  Index size() const override { return static_cast<Index>(azimuth_bins_) * pulses_ * delay_bins_; }
  Index measurements() const override { return static_cast<Index>(channels_) * pulses_ * coeffs_; }
  double atom_norm_sq() const override { return norm_sq_; }
  int delay_bins() const { return delay_bins_; }
  int doppler_bins() const { return pulses_; }
  int azimuth_bins() const { return azimuth_bins_; }

  // Atoms of one Doppler bin over (u, s), column u * N + s, rows ch * K + j.
  CMatrix bin_matrix() const {
    CMatrix a(static_cast<Index>(channels_) * coeffs_, static_cast<Index>(azimuth_bins_) * delay_bins_);
    for (int ch = 0; ch < channels_; ++ch) {
      const CVector& g = weights_[static_cast<std::size_t>(ch)];
      const std::vector<int>& kappa = kappa_[static_cast<std::size_t>(ch)];
      for (int j = 0; j < coeffs_; ++j) {
        const long long k = kappa[static_cast<std::size_t>(j)];
        for (int s = 0; s < delay_bins_; ++s) {
          const Complex delay = g(j) * unit_phasor(-static_cast<double>((k * s) % delay_bins_) / delay_bins_);
          for (int u = 0; u < azimuth_bins_; ++u)
            a(static_cast<Index>(ch) * coeffs_ + j, static_cast<Index>(u) * delay_bins_ + s) = steering_(u, ch) * delay;
        }
      }
    }
    return a;
  }

  // Per Doppler bin r: (1/P) sum_p e^{j 2 pi r p / P} d_ch[p][k].
  std::vector<CVector> bin_blocks(const CVector& data) const {
    const Index block = static_cast<Index>(pulses_) * coeffs_;
    std::vector<CVector> out(static_cast<std::size_t>(pulses_), CVector(static_cast<Index>(channels_) * coeffs_));
    for (int ch = 0; ch < channels_; ++ch) {
      const Eigen::Map<const CMatrix> r(data.data() + ch * block, pulses_, coeffs_);
      const CMatrix psi = fft::inverse_unscaled_columns(r) / static_cast<double>(pulses_);
      for (int nu = 0; nu < pulses_; ++nu)
        out[static_cast<std::size_t>(nu)].segment(static_cast<Index>(ch) * coeffs_, coeffs_) = psi.row(nu).transpose();
    }
    return out;
  }

  CVector correlate(const CVector& residual) const override {
    const Index block = static_cast<Index>(pulses_) * coeffs_;
    const Index cells = static_cast<Index>(pulses_) * delay_bins_;
    CMatrix per_channel(channels_, cells);
    CVector buf(delay_bins_);
    for (int ch = 0; ch < channels_; ++ch) {
      const Eigen::Map<const CMatrix> r(residual.data() + ch * block, pulses_, coeffs_);
      const CMatrix psi = fft::inverse_unscaled_columns(r);
      const CVector& g = weights_[static_cast<std::size_t>(ch)];
      const std::vector<int>& kappa = kappa_[static_cast<std::size_t>(ch)];
      for (int nu = 0; nu < pulses_; ++nu) {
        buf.setZero();
        for (int j = 0; j < coeffs_; ++j) buf(kappa[static_cast<std::size_t>(j)]) += psi(nu, j) * std::conj(g(j));
        per_channel.block(ch, static_cast<Index>(nu) * delay_bins_, 1, delay_bins_) =
            fft::inverse_unscaled(buf).transpose();
      }
    }
    const CMatrix stat = steering_.conjugate() * per_channel;  // azimuth x (r, s)
    CVector out(size());
    for (int u = 0; u < azimuth_bins_; ++u) out.segment(static_cast<Index>(u) * cells, cells) = stat.row(u).transpose();
    return out;
  }

  CVector atom(Index id) const override {
    const int s = static_cast<int>(id % delay_bins_);
    const int nu = static_cast<int>((id / delay_bins_) % pulses_);
    const int u = static_cast<int>(id / (static_cast<Index>(delay_bins_) * pulses_));
    CVector a(measurements());
    const Index block = static_cast<Index>(pulses_) * coeffs_;
    for (int ch = 0; ch < channels_; ++ch) {
      const CVector& g = weights_[static_cast<std::size_t>(ch)];
      const std::vector<int>& kappa = kappa_[static_cast<std::size_t>(ch)];
      for (int j = 0; j < coeffs_; ++j) {
        const long long k = kappa[static_cast<std::size_t>(j)];
        const Complex delay = steering_(u, ch) * g(j) *
                              unit_phasor(-static_cast<double>((k * s) % delay_bins_) / delay_bins_);
        for (int p = 0; p < pulses_; ++p)
          a(ch * block + static_cast<Index>(j) * pulses_ + p) =
              delay * unit_phasor(-static_cast<double>((static_cast<long long>(nu) * p) % pulses_) / pulses_);
      }
    }
    return a;
  }

 private:
  std::vector<CVector> weights_;
  RVector betas_;
  int channels_;
  int pulses_;
  int coeffs_;
  int delay_bins_;
  int azimuth_bins_;
  std::vector<std::vector<int>> kappa_;
  CMatrix steering_;
  double norm_sq_ = 0.0;
};

}  // namespace

RecoveryResult recover_mimo(const XampleSet& x, const ArrayGeometry& array, const std::vector<PulseSpectrum>& spectra,
                            int num_targets, const MimoOptions& options) {
  x.validate();
  array.validate();
  if (num_targets < 1) throw std::invalid_argument("recover_mimo: L must be >= 1");
  if (x.num_channels() != array.num_channels() || x.num_rx != array.num_rx())
    throw std::invalid_argument("recover_mimo: channel count does not match the array geometry");
  if (static_cast<int>(spectra.size()) != array.num_tx())
    throw std::invalid_argument("recover_mimo: one spectrum per transmitter required");
  if (x.schedule.mode != ScheduleMode::uniform) throw std::invalid_argument("recover_mimo: uniform pulse train expected");

  const int channels = x.num_channels();
  const Index block = static_cast<Index>(x.num_frames()) * x.num_coeffs();
  CVector data(block * channels);
  std::vector<CVector> weights;
  RVector betas(channels);
  for (int m = 0; m < array.num_tx(); ++m) {
    const PulseSpectrum& h = spectra[static_cast<std::size_t>(m)];
    if (h.size() != x.params.num_nyquist_bins) throw std::invalid_argument("recover_mimo: spectrum length mismatch");
    for (int q = 0; q < array.num_rx(); ++q) {
      const int ch = array.channel(m, q);
      const BandSelection& sel = x.selection(ch);
      double min_mag = std::numeric_limits<double>::infinity();
      for (int k : sel.kappa) min_mag = std::min(min_mag, std::abs(h.coeffs(k)));
      const bool whiten = min_mag > 1e-6;
      CMatrix d = x.channels[static_cast<std::size_t>(ch)];
      CVector g(sel.size());
      for (int j = 0; j < sel.size(); ++j) {
        const Complex hk = h.coeffs(sel.kappa[static_cast<std::size_t>(j)]);
        if (whiten) {
          d.col(j) *= x.params.pri_s / hk;
          g(j) = 1.0;
        } else {
          g(j) = hk / x.params.pri_s;
        }
      }
      data.segment(ch * block, block) = Eigen::Map<const CVector>(d.data(), d.size());
      weights.push_back(std::move(g));
      betas(ch) = array.beta(m, q, x.params.carrier_hz, options.exact_beta);
    }
  }

  const MimoDictionary dict(x, std::move(weights), betas, array.azimuth_bins());
  detail::PursuitOptions po;
  po.refit = options.refit;
  po.polish = options.polish && options.refit;
  po.tol = options.tol;
  const detail::PursuitResult pr = detail::run_pursuit(dict, data, num_targets, po);

  RecoveryResult result;
  const Index n = dict.delay_bins();
  const Index p = dict.doppler_bins();
  for (std::size_t i = 0; i < pr.support.size(); ++i) {
    const Index id = pr.support[i];
    Detection d;
    d.delay_bin = static_cast<int>(id % n);
    d.doppler_bin = static_cast<int>((id / n) % p);
    d.azimuth_bin = static_cast<int>(id / (n * p));
    d.amplitude = pr.values(static_cast<Index>(i));
    result.detections.push_back(d);
  }
  result.iterations = pr.iterations;
  result.residual_energy = pr.residual.squaredNorm();

  const double tol = options.tol < 0.0 ? 1e-9 * data.norm() : options.tol;
  const Index local = static_cast<Index>(channels) * x.num_coeffs() * dict.azimuth_bins() * n;
  if (options.exact_search && pr.residual.norm() > tol && local <= 20'000'000) {
    const std::vector<CVector> blocks = dict.bin_blocks(data);
    double peak = 0.0;
    for (const CVector& b : blocks) peak = std::max(peak, b.norm());
    std::vector<detail::ExactFit> fits;
    if (detail::blockwise_exact_fit(dict.bin_matrix(), blocks, num_targets, 1e-6, 1e-7 * peak, options.search_budget,
                                    fits)) {
      result.detections.clear();
      CVector residual = data;
      for (std::size_t r = 0; r < fits.size(); ++r)
        for (std::size_t i = 0; i < fits[r].support.size(); ++i) {
          const Index col = fits[r].support[i];
          Detection d;
          d.delay_bin = static_cast<int>(col % n);
          d.doppler_bin = static_cast<int>(r);
          d.azimuth_bin = static_cast<int>(col / n);
          d.amplitude = fits[r].values(static_cast<Index>(i));
          residual -= d.amplitude * dict.atom((static_cast<Index>(d.azimuth_bin) * p + d.doppler_bin) * n + d.delay_bin);
          result.detections.push_back(d);
        }
      result.residual_energy = residual.squaredNorm();
    }
  }
  result.sort_by_magnitude();
  return result;
}

}  // namespace xradar
