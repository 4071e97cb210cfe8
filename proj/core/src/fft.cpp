#include "xradar/fft.hpp"

#include <unsupported/Eigen/FFT>

namespace xradar::fft {

namespace {

// kissfft plans are cached per FFT object; one object per thread keeps the
// cache warm without sharing mutable state.
Eigen::FFT<double>& engine() {
  thread_local Eigen::FFT<double> instance;
  return instance;
}

}  // namespace

CVector forward(const CVector& x) {
  if (x.size() <= 1) return x;
  CVector out(x.size());
  engine().fwd(out, x);
  return out;
}

CVector inverse_unscaled(const CVector& x) {
  if (x.size() <= 1) return x;
  auto& e = engine();
  CVector out(x.size());
  e.SetFlag(Eigen::FFT<double>::Unscaled);
  e.inv(out, x);
  e.ClearFlag(Eigen::FFT<double>::Unscaled);
  return out;
}

CVector inverse(const CVector& x) {
  if (x.size() <= 1) return x;
  CVector out(x.size());
  engine().inv(out, x);
  return out;
}

CMatrix forward_columns(const CMatrix& x) {
  CMatrix out(x.rows(), x.cols());
  for (Index c = 0; c < x.cols(); ++c) out.col(c) = forward(x.col(c));
  return out;
}

CMatrix inverse_unscaled_columns(const CMatrix& x) {
  CMatrix out(x.rows(), x.cols());
  for (Index c = 0; c < x.cols(); ++c) out.col(c) = inverse_unscaled(x.col(c));
  return out;
}

CMatrix forward_rows(const CMatrix& x) {
  CMatrix out(x.rows(), x.cols());
  for (Index r = 0; r < x.rows(); ++r) out.row(r) = forward(x.row(r).transpose()).transpose();
  return out;
}

CMatrix inverse_unscaled_rows(const CMatrix& x) {
  CMatrix out(x.rows(), x.cols());
  for (Index r = 0; r < x.rows(); ++r) out.row(r) = inverse_unscaled(x.row(r).transpose()).transpose();
  return out;
}

}  // namespace xradar::fft
