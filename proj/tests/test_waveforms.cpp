#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "xradar/waveforms.hpp"

using namespace xradar;
using Catch::Approx;

namespace {

// Direct linear correlation sum over all lags, independent of the library.
std::vector<double> direct_autocorrelation(const RVector& x) {
  const int n = static_cast<int>(x.size());
  std::vector<double> c(2 * n - 1, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) c[j - i + n - 1] += x(i) * x(j);
  return c;
}

// Max |<h, M^a T^b h>| over nontrivial (a, b), built from first principles.
double brute_tf_cross(const CVector& h) {
  const int n = static_cast<int>(h.size());
  double best = 0.0;
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a) {
      if (a == 0 && b == 0) continue;
      Complex acc = 0.0;
      for (int t = 0; t < n; ++t)
        acc += std::conj(h(t)) * h(((t - b) % n + n) % n) * oracle::cis(oracle::kTwoPi * a * t / n);
      best = std::max(best, std::abs(acc));
    }
  return best;
}

}  // namespace

TEST_CASE("flat_spectrum - all ones and delta samples") {
  CHECK(flat_spectrum(4).coeffs == CVector::Ones(4));
  CHECK(flat_spectrum(1).coeffs == CVector::Ones(1));
  const CVector h = pulse_samples(flat_spectrum(8));
  CHECK(std::abs(h(0) - Complex(1.0, 0.0)) < 1e-15);
  CHECK(h.tail(7).norm() < 1e-15);
  CHECK_THROWS_AS(flat_spectrum(0), std::invalid_argument);
}

TEST_CASE("spectrum_from_samples - inverse of pulse_samples") {
  Rng rng(3);
  CVector s(12);
  for (Index i = 0; i < 12; ++i) s(i) = rng.complex_normal(1.0);
  CHECK((pulse_samples(spectrum_from_samples(s)) - s).norm() < 1e-13);
}

TEST_CASE("is_prime - small values") {
  CHECK(is_prime(2));
  CHECK(is_prime(5));
  CHECK(is_prime(101));
  CHECK_FALSE(is_prime(1));
  CHECK_FALSE(is_prime(100));
  CHECK_FALSE(is_prime(91));
}

TEST_CASE("alltop_sequence - first sample and unit norm") {
  const CVector h = alltop_sequence(5);
  CHECK(std::abs(h(0) - Complex(1.0 / std::sqrt(5.0), 0.0)) < 1e-15);
  CHECK(h.norm() == Approx(1.0).epsilon(1e-14));
  for (Index i = 0; i < h.size(); ++i) CHECK(std::abs(h(i)) == Approx(1.0 / std::sqrt(5.0)));
  CHECK(std::abs(h(2) - oracle::cis(oracle::kTwoPi * 8.0 / 5.0) / std::sqrt(5.0)) < 1e-14);
}

TEST_CASE("alltop_sequence - max time-frequency cross-correlation") {
  CHECK(brute_tf_cross(alltop_sequence(5)) == Approx(1.0 / std::sqrt(5.0)).margin(1e-12));
  CHECK(brute_tf_cross(alltop_sequence(7)) == Approx(1.0 / std::sqrt(7.0)).margin(1e-12));
}

TEST_CASE("alltop_sequence - rejects bad lengths") {
  CHECK_THROWS_AS(alltop_sequence(3), std::invalid_argument);
  CHECK_THROWS_AS(alltop_sequence(9), std::invalid_argument);
}

TEST_CASE("golay_pair - length 2 expansion") {
  const GolayPair g = golay_pair(2);
  CHECK(g.first == RVector((RVector(2) << 1, 1).finished()));
  CHECK(g.second == RVector((RVector(2) << 1, -1).finished()));
  const RVector sum = aperiodic_autocorrelation(g.first) + aperiodic_autocorrelation(g.second);
  CHECK(sum == RVector((RVector(3) << 0, 4, 0).finished()));
}

TEST_CASE("golay_pair - complementary for lengths 2 to 64") {
  for (int n = 2; n <= 64; n *= 2) {
    const GolayPair g = golay_pair(n);
    const auto a = direct_autocorrelation(g.first);
    const auto b = direct_autocorrelation(g.second);
    for (int lag = 0; lag < 2 * n - 1; ++lag) CHECK(a[lag] + b[lag] == (lag == n - 1 ? 2.0 * n : 0.0));
    const RVector lib = aperiodic_autocorrelation(g.first) + aperiodic_autocorrelation(g.second);
    CHECK(lib(n - 1) == 2.0 * n);
    CHECK(lib.cwiseAbs().sum() == 2.0 * n);
  }
  CHECK_THROWS_AS(golay_pair(6), std::invalid_argument);
  CHECK_THROWS_AS(golay_pair(1), std::invalid_argument);
}

TEST_CASE("TFDictionary - atom layout") {
  const CVector f = alltop_sequence(5);
  const TFDictionary d(f);
  CHECK((d.atom(0) - f).norm() == 0.0);
  const CVector shifted = d.atom(5);
  for (Index t = 0; t < 5; ++t) CHECK(shifted(t) == f((t + 4) % 5));
  const CVector mod = d.atom(2);
  for (Index t = 0; t < 5; ++t) CHECK(std::abs(mod(t) - f(t) * oracle::cis(oracle::kTwoPi * 2.0 * t / 5.0)) < 1e-14);
  for (Index i = 0; i < 25; ++i) CHECK(d.atom(i).norm() == Approx(f.norm()));
  CHECK_THROWS_AS(TFDictionary(CVector::Ones(1)), std::invalid_argument);
}

TEST_CASE("TFDictionary - apply and adjoint match the dense matrix") {
  Rng rng(8);
  CVector f(6);
  for (Index i = 0; i < 6; ++i) f(i) = rng.complex_normal(1.0);
  const TFDictionary d(f);
  const CMatrix dense = d.dense();
  CVector x(36);
  for (Index i = 0; i < 36; ++i) x(i) = rng.complex_normal(1.0);
  CVector y(6);
  for (Index i = 0; i < 6; ++i) y(i) = rng.complex_normal(1.0);
  CHECK((d.apply(x) - dense * x).norm() < 1e-12);
  CHECK((d.adjoint(y) - dense.adjoint() * y).norm() < 1e-12);
}

TEST_CASE("coherence - Alltop dictionary") {
  const CMatrix dense = TFDictionary(alltop_sequence(5)).dense();
  double gram_max = 0.0;
  for (Index i = 0; i < dense.cols(); ++i)
    for (Index j = 0; j < dense.cols(); ++j) {
      if (i == j) continue;
      Complex acc = 0.0;
      for (Index t = 0; t < dense.rows(); ++t) acc += std::conj(dense(t, i)) * dense(t, j);
      gram_max = std::max(gram_max, std::abs(acc));
    }
  CHECK(coherence(dense) == Approx(1.0 / std::sqrt(5.0)).margin(1e-12));
  CHECK(coherence(dense) == Approx(gram_max).margin(1e-12));
}

TEST_CASE("coherence - simple matrices") {
  CHECK(coherence(CMatrix::Identity(4, 4)) == 0.0);
  CMatrix twin(3, 2);
  twin << 1.0, 1.0, Complex(0.0, 2.0), Complex(0.0, 2.0), -1.0, -1.0;
  CHECK(coherence(twin) == Approx(1.0));

  CMatrix m(3, 4);
  m << 1, 0, 1, 2, 0, 1, 1, 0, 0, 0, 1, 1;
  // Hand Gram: |<c0,c3>| / (1 * sqrt5) = 2 / sqrt5 is the largest entry.
  CHECK(coherence(m) == Approx(2.0 / std::sqrt(5.0)));
  CMatrix zero = CMatrix::Zero(3, 2);
  zero(0, 0) = 1.0;
  CHECK_THROWS_AS(coherence(zero), std::invalid_argument);
}
