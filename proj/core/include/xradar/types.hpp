#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace xradar {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;
using Index = Eigen::Index;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kSpeedOfLight = 299792458.0;

/// e^{j*2*pi*cycles}, with the argument reduced to [0, 1) cycles first so
/// large grid products keep full phase precision.
inline Complex unit_phasor(double cycles) {
  double frac = cycles - std::floor(cycles);
  return std::polar(1.0, kTwoPi * frac);
}

/// Raised when two targets land in the same quantized grid cell.
class QuantizationCollision : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when folded MPRF estimates admit no congruent unfolding.
class AmbiguityUnresolved : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace xradar
