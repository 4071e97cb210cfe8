#include "xradar/focusing.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "pursuit.hpp"
#include "xradar/cs.hpp"
#include "xradar/fft.hpp"

namespace xradar {

CVector sum_of_exponents(const RVector& nu_offsets_rad_s, const PulseSchedule& schedule, double pri_s) {
  schedule.validate();
  CVector g = CVector::Zero(nu_offsets_rad_s.size());
  for (Index i = 0; i < g.size(); ++i) {
    const double cycles_per_slot = nu_offsets_rad_s(i) * pri_s / kTwoPi;
    for (int m : schedule.slots) g(i) += unit_phasor(std::fmod(cycles_per_slot * m, 1.0));
  }
  return g;
}

namespace {

// Atoms a_f[k] = g[k] e^{-j 2 pi kappa_k s / N} e^{-j 2 pi r t_f / P} v_q[f],
// id = (q * P + r) * N + s, flattened column-major from frames x K.
class FocusDictionary final : public detail::GridDictionary {
 public:
  FocusDictionary(const XampleSet& x, int channel, CVector weights, int hypotheses)
      : kappa_(x.selection(channel).kappa),
        weights_(std::move(weights)),
        frames_(x.schedule.num_frames()),
        coeffs_(static_cast<int>(kappa_.size())),
        delay_bins_(x.params.num_nyquist_bins),
        doppler_bins_(x.schedule.num_slots),
        hypotheses_(hypotheses),
        codes_(CMatrix::Ones(frames_, hypotheses)) {
    for (int f = 0; f < frames_; ++f) times_.push_back(x.schedule.frame_time(f));
    if (x.schedule.mode == ScheduleMode::phase_coded) {
      const int pulses = x.schedule.num_transmitted();
      for (int q = 0; q < hypotheses_; ++q) {
        for (int f = 0; f < frames_; ++f) {
          const int p = f - q;
          if (p < 0 || p >= pulses) {
            codes_(f, q) = 0.0;
            continue;
          }
          const double phase = x.schedule.phases[static_cast<std::size_t>(p)];
          if (phase != 0.0) codes_(f, q) = std::polar(1.0, phase);
        }
      }
    }
    norm_sq_ = codes_.col(0).squaredNorm() * weights_.squaredNorm();
  }

  Index size() const override {
    return static_cast<Index>(hypotheses_) * doppler_bins_ * delay_bins_;
  }
  Index measurements() const override { return static_cast<Index>(frames_) * coeffs_; }
  double atom_norm_sq() const override { return norm_sq_; }

  int delay_bins() const { return delay_bins_; }
  int doppler_bins() const { return doppler_bins_; }
  int frames() const { return frames_; }
  int coeffs() const { return coeffs_; }

  CVector correlate(const CVector& residual) const override {
    const Eigen::Map<const CMatrix> r(residual.data(), frames_, coeffs_);
    CVector out(size());
    CVector buf(delay_bins_);
    for (int q = 0; q < hypotheses_; ++q) {
      CMatrix folded = CMatrix::Zero(doppler_bins_, coeffs_);
      for (int f = 0; f < frames_; ++f) {
        const Complex w = std::conj(codes_(f, q));
        if (w == Complex(0.0)) continue;
        const int t = times_[static_cast<std::size_t>(f)] % doppler_bins_;
        if (w == Complex(1.0))
          folded.row(t) += r.row(f);
        else
          folded.row(t) += w * r.row(f);
      }
      const CMatrix psi = fft::inverse_unscaled_columns(folded);
      for (int nu = 0; nu < doppler_bins_; ++nu) {
        buf.setZero();
        for (int j = 0; j < coeffs_; ++j)
          buf(kappa_[static_cast<std::size_t>(j)]) = psi(nu, j) * std::conj(weights_(j));
        out.segment((static_cast<Index>(q) * doppler_bins_ + nu) * delay_bins_, delay_bins_) =
            fft::inverse_unscaled(buf);
      }
    }
    return out;
  }

  CVector atom(Index id) const override {
    const int s = static_cast<int>(id % delay_bins_);
    const Index rest = id / delay_bins_;
    const int nu = static_cast<int>(rest % doppler_bins_);
    const int q = static_cast<int>(rest / doppler_bins_);
    CVector a(measurements());
    for (int j = 0; j < coeffs_; ++j) {
      const long long k = kappa_[static_cast<std::size_t>(j)];
      const Complex delay = weights_(j) * unit_phasor(-static_cast<double>((k * s) % delay_bins_) / delay_bins_);
      for (int f = 0; f < frames_; ++f) {
        const long long t = times_[static_cast<std::size_t>(f)];
        const Complex slow = unit_phasor(-static_cast<double>((nu * t) % doppler_bins_) / doppler_bins_);
        a(static_cast<Index>(j) * frames_ + f) = delay * slow * codes_(f, q);
      }
    }
    return a;
  }

  /// Atom at fractional delay s and Doppler nu (in bins).
  CVector atom_at(double s, double nu, int q) const {
    CVector a(measurements());
    for (int j = 0; j < coeffs_; ++j) {
      const double k = kappa_[static_cast<std::size_t>(j)];
      const Complex delay = weights_(j) * unit_phasor(-std::fmod(k * s / delay_bins_, 1.0));
      for (int f = 0; f < frames_; ++f) {
        const double t = times_[static_cast<std::size_t>(f)];
        a(static_cast<Index>(j) * frames_ + f) =
            delay * unit_phasor(-std::fmod(nu * t / doppler_bins_, 1.0)) * codes_(f, q);
      }
    }
    return a;
  }

  // Right factor for the matrix backend: B[f][(q, r)] = e^{-j 2 pi r t_f / P} v_q[f].
  CMatrix slow_time_matrix() const {
    CMatrix b(frames_, static_cast<Index>(hypotheses_) * doppler_bins_);
    for (int q = 0; q < hypotheses_; ++q)
      for (int nu = 0; nu < doppler_bins_; ++nu)
        for (int f = 0; f < frames_; ++f) {
          const long long t = times_[static_cast<std::size_t>(f)];
          b(f, static_cast<Index>(q) * doppler_bins_ + nu) =
              unit_phasor(-static_cast<double>((nu * t) % doppler_bins_) / doppler_bins_) * codes_(f, q);
        }
    return b;
  }

  // Left factor: A[k][s] = g[k] e^{-j 2 pi kappa_k s / N}.
  CMatrix delay_matrix() const {
    CMatrix a(coeffs_, delay_bins_);
    for (int j = 0; j < coeffs_; ++j) {
      const long long k = kappa_[static_cast<std::size_t>(j)];
      for (int s = 0; s < delay_bins_; ++s)
        a(j, s) = weights_(j) * unit_phasor(-static_cast<double>((k * s) % delay_bins_) / delay_bins_);
    }
    return a;
  }

 private:
  std::vector<int> kappa_;
  CVector weights_;
  int frames_;
  int coeffs_;
  int delay_bins_;
  int doppler_bins_;
  int hypotheses_;
  CMatrix codes_;
  std::vector<int> times_;
  double norm_sq_ = 0.0;
};

bool orthogonal_columns(const CMatrix& m) {
  if (m.cols() > m.rows()) return false;
  const CMatrix gram = m.adjoint() * m;
  const double scale = gram.diagonal().real().mean();
  return (gram - scale * CMatrix::Identity(m.cols(), m.cols())).cwiseAbs().maxCoeff() <= 1e-9 * scale;
}

constexpr double kExactRelTol = 1e-6;
constexpr Index kMaxDenseEntries = 20'000'000;

// Sparsest exact fit of the whitened data with at most num_targets atoms.
std::optional<std::vector<Detection>> exact_completion(const FocusDictionary& dict, const CVector& data,
                                                       int num_targets, long long budget) {
  const Eigen::Map<const CMatrix> d(data.data(), dict.frames(), dict.coeffs());
  const int n = dict.delay_bins();
  const int p = dict.doppler_bins();
  std::vector<Detection> out;
  auto add = [&out](int s, int r, int q, Complex value) {
    Detection det;
    det.delay_bin = s;
    det.doppler_bin = r;
    det.ambiguity_order = q;
    det.amplitude = value;
    out.push_back(det);
  };

  const CMatrix slow = dict.slow_time_matrix();
  if (orthogonal_columns(slow)) {
    const CMatrix delay = dict.delay_matrix();
    if (delay.size() <= kMaxDenseEntries) {
      const CMatrix z = (slow.adjoint() * d) / slow.col(0).squaredNorm();
      std::vector<CVector> blocks;
      double peak = 0.0;
      for (Index h = 0; h < z.rows(); ++h) {
        blocks.emplace_back(z.row(h).transpose());
        peak = std::max(peak, blocks.back().norm());
      }
      std::vector<detail::ExactFit> fits;
      if (!detail::blockwise_exact_fit(delay, blocks, num_targets, kExactRelTol, 1e-7 * peak, budget, fits))
        return std::nullopt;
      for (std::size_t h = 0; h < fits.size(); ++h)
        for (std::size_t i = 0; i < fits[h].support.size(); ++i)
          add(static_cast<int>(fits[h].support[i]), static_cast<int>(h) % p, static_cast<int>(h) / p,
              fits[h].values(static_cast<Index>(i)));
      return out;
    }
  }
  if (dict.coeffs() == n) {
    const CMatrix delay = dict.delay_matrix();
    if (orthogonal_columns(delay) && slow.size() <= kMaxDenseEntries) {
      const CMatrix w = (d * delay.conjugate()) / delay.col(0).squaredNorm();
      std::vector<CVector> blocks;
      double peak = 0.0;
      for (Index s = 0; s < w.cols(); ++s) {
        blocks.emplace_back(w.col(s));
        peak = std::max(peak, blocks.back().norm());
      }
      std::vector<detail::ExactFit> fits;
      if (!detail::blockwise_exact_fit(slow, blocks, num_targets, kExactRelTol, 1e-7 * peak, budget, fits))
        return std::nullopt;
      for (std::size_t s = 0; s < fits.size(); ++s)
        for (std::size_t i = 0; i < fits[s].support.size(); ++i) {
          const int h = static_cast<int>(fits[s].support[i]);
          add(static_cast<int>(s), h % p, h / p, fits[s].values(static_cast<Index>(i)));
        }
      return out;
    }
  }
  if (dict.measurements() * dict.size() > kMaxDenseEntries) return std::nullopt;
  CMatrix atoms(dict.measurements(), dict.size());
  for (Index id = 0; id < dict.size(); ++id) atoms.col(id) = dict.atom(id);
  detail::ExactFit fit;
  if (!detail::exact_fit(atoms, data, num_targets, kExactRelTol * data.norm(), budget, fit)) return std::nullopt;
  for (std::size_t i = 0; i < fit.support.size(); ++i) {
    const Index id = fit.support[i];
    add(static_cast<int>(id % n), static_cast<int>((id / n) % p), static_cast<int>(id / (static_cast<Index>(n) * p)),
        fit.values(static_cast<Index>(i)));
  }
  return out;
}

struct Prepared {
  CVector data;     // flattened frames x K, whitened when possible
  CVector weights;  // atom spectral weights g[k]
};

Prepared prepare(const XampleSet& x, int channel, const PulseSpectrum& spectrum, double whiten_floor) {
  const BandSelection& sel = x.selection(channel);
  const CMatrix& c = x.channels.at(static_cast<std::size_t>(channel));
  double min_mag = std::numeric_limits<double>::infinity();
  for (int k : sel.kappa) min_mag = std::min(min_mag, std::abs(spectrum.coeffs(k)));
  const bool whiten = min_mag > whiten_floor;

  Prepared out;
  out.weights.resize(sel.size());
  CMatrix d = c;
  for (int j = 0; j < sel.size(); ++j) {
    const Complex h = spectrum.coeffs(sel.kappa[static_cast<std::size_t>(j)]);
    if (whiten) {
      d.col(j) *= x.params.pri_s / h;
      out.weights(j) = 1.0;
    } else {
      out.weights(j) = h / x.params.pri_s;
    }
  }
  out.data = Eigen::Map<const CVector>(d.data(), d.size());
  return out;
}

void check_inputs(const XampleSet& x, const PulseSpectrum& spectrum, int num_targets) {
  x.validate();
  if (num_targets < 1) throw std::invalid_argument("recovery: L must be >= 1");
  if (x.num_coeffs() < 1) throw std::invalid_argument("recovery: K must be >= 1");
  if (spectrum.size() != x.params.num_nyquist_bins)
    throw std::invalid_argument("recovery: spectrum length must equal the Nyquist bin count");
}

double golden_max(const std::function<double(double)>& f, double lo, double hi) {
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - ratio * (b - a), d = a + ratio * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 40; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = f(d);
    }
  }
  const double mid = 0.5 * (a + b);
  return f(mid) >= f(0.0) ? mid : 0.0;
}

// Off-grid polish of each detection against the data with the other
// detections removed.
void refine_detections(const FocusDictionary& dict, const CVector& data, RecoveryResult& result) {
  auto& dets = result.detections;
  std::vector<CVector> atoms;
  for (const Detection& d : dets) atoms.push_back(dict.atom_at(d.delay_bin, d.doppler_bin, d.ambiguity_order));
  for (std::size_t i = 0; i < dets.size(); ++i) {
    CVector res = data;
    for (std::size_t j = 0; j < dets.size(); ++j)
      if (j != i) res -= dets[j].amplitude * atoms[j];
    Detection& d = dets[i];
    double ds = 0.0, dr = 0.0;
    for (int round = 0; round < 2; ++round) {
      ds = golden_max([&](double v) { return std::abs(dict.atom_at(d.delay_bin + v, d.doppler_bin + dr, d.ambiguity_order).dot(res)); },
                      -0.5, 0.5);
      dr = golden_max([&](double v) { return std::abs(dict.atom_at(d.delay_bin + ds, d.doppler_bin + v, d.ambiguity_order).dot(res)); },
                      -0.5, 0.5);
    }
    atoms[i] = dict.atom_at(d.delay_bin + ds, d.doppler_bin + dr, d.ambiguity_order);
    d.amplitude = atoms[i].dot(res) / atoms[i].squaredNorm();
    d.delay_offset = ds;
    d.doppler_offset = dr;
  }
}

RecoveryResult recover_grid(const XampleSet& x, const PulseSpectrum& spectrum, int num_targets,
                            const FocusOptions& options, int hypotheses) {
  const Prepared prep = prepare(x, 0, spectrum, options.whiten_floor);
  const FocusDictionary dict(x, 0, prep.weights, hypotheses);
  const Index n = dict.delay_bins();
  const Index p = dict.doppler_bins();

  RecoveryResult result;
  if (options.backend == FocusBackend::matrix_omp) {
    const Eigen::Map<const CMatrix> d(prep.data.data(), x.num_frames(), x.num_coeffs());
    const int sparsity = std::min<int>(num_targets, static_cast<int>(d.size()));
    const cs::MatrixSparseSolution sol =
        cs::omp_matrix(dict.delay_matrix(), dict.slow_time_matrix(), d.transpose(), sparsity, options.tol);
    for (std::size_t i = 0; i < sol.support.size(); ++i) {
      Detection det;
      det.delay_bin = static_cast<int>(sol.support[i].first);
      det.doppler_bin = static_cast<int>(sol.support[i].second % p);
      det.ambiguity_order = static_cast<int>(sol.support[i].second / p);
      det.amplitude = sol.values(static_cast<Index>(i));
      result.detections.push_back(det);
    }
    result.iterations = sol.iterations;
  } else {
    detail::PursuitOptions po;
    po.refit = options.refit;
    po.polish = options.polish && options.refit;
    po.tol = options.tol;
    const detail::PursuitResult pr = detail::run_pursuit(dict, prep.data, num_targets, po);
    for (std::size_t i = 0; i < pr.support.size(); ++i) {
      const Index id = pr.support[i];
      Detection det;
      det.delay_bin = static_cast<int>(id % n);
      det.doppler_bin = static_cast<int>((id / n) % p);
      det.ambiguity_order = static_cast<int>(id / (n * p));
      det.amplitude = pr.values(static_cast<Index>(i));
      result.detections.push_back(det);
    }
    result.iterations = pr.iterations;
  }
  if (options.exact_search) {
    CVector residual = prep.data;
    for (const Detection& det : result.detections)
      residual -= det.amplitude * dict.atom((static_cast<Index>(det.ambiguity_order) * p + det.doppler_bin) * n + det.delay_bin);
    const double tol = options.tol < 0.0 ? 1e-9 * prep.data.norm() : options.tol;
    if (residual.norm() > tol) {
      if (auto exact = exact_completion(dict, prep.data, num_targets, options.search_budget))
        result.detections = std::move(*exact);
    }
  }
  if (options.refine) refine_detections(dict, prep.data, result);
  result.sort_by_magnitude();
  result.residual_energy = residual_energy(x, spectrum, result);
  return result;
}

}  // namespace

FocusedCoeffs doppler_focus(const XampleSet& x, int channel) {
  if (x.schedule.mode == ScheduleMode::phase_coded)
    throw std::invalid_argument("doppler_focus: phase-coded trains are focused per ambiguity order");
  const CMatrix& c = x.channels.at(static_cast<std::size_t>(channel));
  const int slots = x.schedule.num_slots;
  CMatrix folded = CMatrix::Zero(slots, c.cols());
  for (int f = 0; f < x.schedule.num_frames(); ++f) folded.row(x.schedule.frame_time(f)) += c.row(f);
  return {fft::inverse_unscaled_columns(folded), x.selection(channel).kappa, x.schedule.num_transmitted()};
}

RecoveryResult recover_focused(const XampleSet& x, const PulseSpectrum& spectrum, int num_targets,
                               const FocusOptions& options) {
  check_inputs(x, spectrum, num_targets);
  if (x.num_channels() != 1) throw std::invalid_argument("recover_focused: single-channel data expected");
  if (x.schedule.mode == ScheduleMode::phase_coded)
    throw std::invalid_argument("recover_focused: use recover_phase_coded for phase-coded trains");
  return recover_grid(x, spectrum, num_targets, options, 1);
}

RecoveryResult recover_phase_coded(const XampleSet& x, const PulseSpectrum& spectrum, int num_targets,
                                   const FocusOptions& options) {
  check_inputs(x, spectrum, num_targets);
  if (x.num_channels() != 1) throw std::invalid_argument("recover_phase_coded: single-channel data expected");
  if (x.schedule.mode != ScheduleMode::phase_coded)
    throw std::invalid_argument("recover_phase_coded: schedule is not phase coded");
  return recover_grid(x, spectrum, num_targets, options, x.schedule.ambiguity_factor);
}

double residual_energy(const XampleSet& x, const PulseSpectrum& spectrum, const RecoveryResult& result) {
  const BandSelection& sel = x.selection(0);
  CVector weights(sel.size());
  for (int j = 0; j < sel.size(); ++j) weights(j) = spectrum.coeffs(sel.kappa[static_cast<std::size_t>(j)]) / x.params.pri_s;
  const int hypotheses = x.schedule.mode == ScheduleMode::phase_coded ? x.schedule.ambiguity_factor : 1;
  const FocusDictionary dict(x, 0, weights, hypotheses);
  const CMatrix& c = x.channels.front();
  CVector r = Eigen::Map<const CVector>(c.data(), c.size());
  for (const Detection& d : result.detections) {
    if (d.ambiguity_order < 0 || d.ambiguity_order >= hypotheses) continue;
    r -= d.amplitude * dict.atom_at(d.delay_bin + d.delay_offset, d.doppler_bin + d.doppler_offset, d.ambiguity_order);
  }
  return r.squaredNorm();
}

namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

double mprf_resolve(const std::vector<PrfEstimate>& estimates, int max_unfold, MprfMode mode, double bin_width) {
  if (estimates.size() < 2) throw std::invalid_argument("mprf_resolve: at least two PRFs required");
  if (max_unfold < 0) throw std::invalid_argument("mprf_resolve: max_unfold must be >= 0");
  if (!(bin_width > 0.0)) throw std::invalid_argument("mprf_resolve: bin width must be positive");
  for (const auto& e : estimates)
    if (!(e.interval > 0.0)) throw std::invalid_argument("mprf_resolve: intervals must be positive");
  const std::size_t trains = estimates.size();

  if (mode == MprfMode::velocity) {
    const int span = 2 * max_unfold + 1;
    double total = 1.0;
    for (std::size_t i = 0; i < trains; ++i) total *= span;
    if (total > 5e7) throw std::invalid_argument("mprf_resolve: unfolding search space too large");
    std::vector<int> k(trains, -max_unfold);
    std::vector<double> vals(trains);
    double best_spread = std::numeric_limits<double>::infinity();
    int best_cost = std::numeric_limits<int>::max();
    double best_value = 0.0;
    while (true) {
      int cost = 0;
      for (std::size_t i = 0; i < trains; ++i) {
        vals[i] = estimates[i].folded + k[i] * estimates[i].interval;
        cost += std::abs(k[i]);
      }
      const auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
      const double spread = *hi - *lo;
      // Spreads equal to rounding precision count as ties.
      const double eps = 1e-12 * std::max(1.0, std::abs(*hi));
      if (spread < best_spread - eps || (std::abs(spread - best_spread) <= eps && cost < best_cost)) {
        best_spread = spread;
        best_cost = cost;
        best_value = std::accumulate(vals.begin(), vals.end(), 0.0) / static_cast<double>(trains);
      }
      std::size_t i = 0;
      while (i < trains && ++k[i] > max_unfold) k[i++] = -max_unfold;
      if (i == trains) break;
    }
    if (best_spread > bin_width) throw AmbiguityUnresolved("mprf_resolve: no congruent velocity unfolding within one bin");
    return best_value;
  }

  double best_cost = std::numeric_limits<double>::infinity();
  double best_median = 0.0;
  double best_spread = 0.0;
  for (int k0 = 0; k0 <= max_unfold; ++k0) {
    std::vector<double> vals(trains);
    vals[0] = estimates[0].folded + k0 * estimates[0].interval;
    for (std::size_t i = 1; i < trains; ++i) {
      const double ki = std::max(0.0, std::round((vals[0] - estimates[i].folded) / estimates[i].interval));
      vals[i] = estimates[i].folded + ki * estimates[i].interval;
    }
    const double med = median_of(vals);
    double cost = 0.0;
    double spread = 0.0;
    for (double v : vals) {
      cost += (v - med) * (v - med);
      spread = std::max(spread, std::abs(v - med));
    }
    // Near-equal costs keep the smaller unfolding.
    if (cost < best_cost - 1e-9 * bin_width * bin_width) {
      best_cost = cost;
      best_median = med;
      best_spread = spread;
    }
  }
  if (best_spread > bin_width) throw AmbiguityUnresolved("mprf_resolve: range clusters do not agree within one bin");
  return best_median;
}

}  // namespace xradar
