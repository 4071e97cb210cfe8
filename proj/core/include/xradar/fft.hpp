#pragma once

#include "xradar/types.hpp"

namespace xradar::fft {

/// X[k] = sum_n x[n] e^{-j 2 pi k n / N}
CVector forward(const CVector& x);

/// x[n] = sum_k X[k] e^{+j 2 pi k n / N}, no 1/N factor.
CVector inverse_unscaled(const CVector& x);

/// x[n] = (1/N) sum_k X[k] e^{+j 2 pi k n / N}
CVector inverse(const CVector& x);

/// Column-wise transforms (each column is one signal).
CMatrix forward_columns(const CMatrix& x);
CMatrix inverse_unscaled_columns(const CMatrix& x);

/// Row-wise transforms (each row is one signal).
CMatrix forward_rows(const CMatrix& x);
CMatrix inverse_unscaled_rows(const CMatrix& x);

}  // namespace xradar::fft
