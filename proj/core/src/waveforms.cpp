#include "xradar/waveforms.hpp"

#include <cmath>
#include <stdexcept>

#include "xradar/fft.hpp"

namespace xradar {

PulseSpectrum flat_spectrum(int n) {
  if (n < 1) throw std::invalid_argument("flat_spectrum: n must be >= 1");
  return {CVector::Ones(n), "flat"};
}

PulseSpectrum spectrum_from_samples(const CVector& samples, std::string label) {
  if (samples.size() == 0) throw std::invalid_argument("spectrum_from_samples: empty pulse");
  return {fft::forward(samples), std::move(label)};
}

CVector pulse_samples(const PulseSpectrum& spectrum) { return fft::inverse(spectrum.coeffs); }

bool is_prime(int n) {
  if (n < 2) return false;
  for (int d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

CVector alltop_sequence(int n) {
  if (n < 5 || !is_prime(n)) throw std::invalid_argument("alltop_sequence: n must be a prime >= 5");
  CVector h(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int m = 0; m < n; ++m) {
    // m^3 mod n in integers keeps the phase exact.
    const long long cube = (static_cast<long long>(m) * m % n) * m % n;
    h(m) = scale * unit_phasor(static_cast<double>(cube) / n);
  }
  return h;
}

GolayPair golay_pair(int n) {
  if (n < 2 || (n & (n - 1)) != 0) throw std::invalid_argument("golay_pair: length must be a power of two >= 2");
  RVector a(2), b(2);
  a << 1.0, 1.0;
  b << 1.0, -1.0;
  while (a.size() < n) {
    RVector na(2 * a.size()), nb(2 * a.size());
    na << a, b;
    nb << a, -b;
    a = std::move(na);
    b = std::move(nb);
  }
  return {a, b};
}

RVector aperiodic_autocorrelation(const RVector& x) {
  const Index n = x.size();
  if (n == 0) return {};
  RVector c = RVector::Zero(2 * n - 1);
  for (Index lag = -(n - 1); lag <= n - 1; ++lag) {
    double acc = 0.0;
    for (Index i = 0; i < n; ++i) {
      const Index j = i + lag;
      if (j >= 0 && j < n) acc += x(i) * x(j);
    }
    c(lag + n - 1) = acc;
  }
  return c;
}

TFDictionary::TFDictionary(CVector pulse_samples) : pulse_(std::move(pulse_samples)) {
  if (pulse_.size() < 2) throw std::invalid_argument("TFDictionary: pulse must have at least 2 samples");
}

CVector TFDictionary::shifted(Index shift) const {
  const Index n = pulse_.size();
  CVector g(n);
  for (Index i = 0; i < n; ++i) g(i) = pulse_(((i - shift) % n + n) % n);
  return g;
}

CVector TFDictionary::atom(Index i) const {
  const Index n = pulse_.size();
  if (i < 0 || i >= n * n) throw std::out_of_range("TFDictionary::atom: index out of range");
  const Index mod = i % n;
  CVector g = shifted(i / n);
  for (Index t = 0; t < n; ++t) g(t) *= unit_phasor(static_cast<double>((mod * t) % n) / n);
  return g;
}

CMatrix TFDictionary::dense() const {
  if (size() > kMaxDenseSize)
    throw std::length_error("TFDictionary::dense: N above the dense limit; use the operator form");
  CMatrix d(rows(), cols());
  for (Index i = 0; i < cols(); ++i) d.col(i) = atom(i);
  return d;
}

CVector TFDictionary::apply(const CVector& x) const {
  // sum_a x[a + bN] M^a g_b = g_b .* (unscaled inverse DFT of x[., b]).
  const Index n = pulse_.size();
  if (x.size() != n * n) throw std::invalid_argument("TFDictionary::apply: wrong input length");
  CVector y = CVector::Zero(n);
  for (Index b = 0; b < n; ++b) {
    const CVector mods = fft::inverse_unscaled(x.segment(b * n, n));
    y += shifted(b).cwiseProduct(mods);
  }
  return y;
}

CVector TFDictionary::adjoint(const CVector& y) const {
  const Index n = pulse_.size();
  if (y.size() != n) throw std::invalid_argument("TFDictionary::adjoint: wrong input length");
  CVector x(n * n);
  for (Index b = 0; b < n; ++b) x.segment(b * n, n) = fft::forward(shifted(b).conjugate().cwiseProduct(y));
  return x;
}

RVector TFDictionary::column_norms() const { return RVector::Constant(cols(), pulse_.norm()); }

double coherence(const CMatrix& matrix) {
  if (matrix.cols() < 2) throw std::invalid_argument("coherence: need at least two columns");
  const RVector norms = matrix.colwise().norm().transpose();
  for (Index j = 0; j < norms.size(); ++j)
    if (norms(j) == 0.0) throw std::invalid_argument("coherence: zero column " + std::to_string(j));
  const CMatrix gram = matrix.adjoint() * matrix;
  double best = 0.0;
  for (Index j = 0; j < gram.cols(); ++j)
    for (Index i = 0; i < j; ++i) best = std::max(best, std::abs(gram(i, j)) / (norms(i) * norms(j)));
  return best;
}

}  // namespace xradar
