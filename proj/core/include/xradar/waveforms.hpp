#pragma once

#include <string>

#include "xradar/cs.hpp"
#include "xradar/types.hpp"

namespace xradar {

/// Fourier-series coefficients H[k], k = 0..N-1, of the transmitted pulse.
struct PulseSpectrum {
  CVector coeffs;
  std::string label;

  int size() const { return static_cast<int>(coeffs.size()); }
  double energy() const { return coeffs.squaredNorm(); }
};

/// H[k] = 1 for all k; the Nyquist samples are a unit delta.
PulseSpectrum flat_spectrum(int n);

/// Spectrum whose normalized inverse DFT is `samples`.
PulseSpectrum spectrum_from_samples(const CVector& samples, std::string label = "samples");

/// Nyquist-rate samples h[n] = (1/N) sum_k H[k] e^{j 2 pi k n / N}.
CVector pulse_samples(const PulseSpectrum& spectrum);

bool is_prime(int n);

/// h[m] = e^{j 2 pi m^3 / n} / sqrt(n) for prime n >= 5.
CVector alltop_sequence(int n);

struct GolayPair {
  RVector first;
  RVector second;
};

/// Complementary pair of length n (a power of two) by recursive
/// concatenation (a|b, a|-b) from (1, 1), (1, -1).
GolayPair golay_pair(int n);

/// Aperiodic autocorrelation C[k] = sum_n x[n] x[n + k] for k = -(n-1)..(n-1);
/// entry i holds lag i - (n - 1).
RVector aperiodic_autocorrelation(const RVector& x);

/// Gabor (time-shift / modulation) dictionary of a length-N pulse: atom
/// i = M^{i mod N} T^{floor(i / N)} f, with T the cyclic down-shift and
/// M = diag(e^{j 2 pi n / N}). Atoms are applied implicitly; dense() is
/// available for N <= 64.
class TFDictionary final : public cs::LinearOperator {
 public:
  static constexpr int kMaxDenseSize = 64;

  explicit TFDictionary(CVector pulse_samples);

  int size() const { return static_cast<int>(pulse_.size()); }
  const CVector& pulse() const { return pulse_; }

  CVector atom(Index i) const;
  CMatrix dense() const;

  Index rows() const override { return pulse_.size(); }
  Index cols() const override { return pulse_.size() * pulse_.size(); }
  CVector apply(const CVector& x) const override;
  CVector adjoint(const CVector& y) const override;
  CVector column(Index j) const override { return atom(j); }
  RVector column_norms() const override;

 private:
  CVector shifted(Index shift) const;

  CVector pulse_;
};

/// Largest normalized inner product between distinct columns.
double coherence(const CMatrix& matrix);

}  // namespace xradar
