#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "xradar/types.hpp"

namespace xradar::cs {

/// Linear map A: C^cols -> C^rows given by its action and adjoint action, so
/// partial-Fourier style sensing never needs a dense matrix.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;

  virtual Index rows() const = 0;
  virtual Index cols() const = 0;
  virtual CVector apply(const CVector& x) const = 0;
  virtual CVector adjoint(const CVector& y) const = 0;

  /// Column j; the default applies A to a unit vector.
  virtual CVector column(Index j) const;
  /// l2 norm of every column.
  virtual RVector column_norms() const;
};

class DenseOperator final : public LinearOperator {
 public:
  explicit DenseOperator(CMatrix matrix) : matrix_(std::move(matrix)) {}

  Index rows() const override { return matrix_.rows(); }
  Index cols() const override { return matrix_.cols(); }
  CVector apply(const CVector& x) const override { return matrix_ * x; }
  CVector adjoint(const CVector& y) const override { return matrix_.adjoint() * y; }
  CVector column(Index j) const override { return matrix_.col(j); }
  RVector column_norms() const override { return matrix_.colwise().norm().transpose(); }

  const CMatrix& matrix() const { return matrix_; }

 private:
  CMatrix matrix_;
};

struct SparseProblem {
  const LinearOperator& sensing;
  CVector observation;
  int sparsity = 1;
  /// Residual-norm stopping threshold; negative selects 1e-9 * ||z||.
  double tol = -1.0;
};

struct SparseSolution {
  std::vector<Index> support;
  CVector values;
  double residual_norm = 0.0;
  int iterations = 0;
  /// Residual norm after each iteration (OMP only).
  std::vector<double> residual_history;

  /// Expand to a dense vector of length n.
  CVector dense(Index n) const;
};

/// Raised by omp when the refit submatrix loses rank; carries the solution
/// built so far.
class RankDeficientSupport : public std::runtime_error {
 public:
  RankDeficientSupport(const std::string& what, SparseSolution partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const SparseSolution& partial() const { return partial_; }

 private:
  SparseSolution partial_;
};

class SolverDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Orthogonal matching pursuit. Selection uses unit-normalized atoms, the
/// refit is an exact least-squares solve on the raw atoms of the support.
SparseSolution omp(const SparseProblem& problem);

struct IhtOptions {
  /// Gradient step; <= 0 selects 0.9 / ||A||^2 from 20 power iterations.
  double step = 0.0;
  int max_iters = 1000;
  double tol = 1e-10;
};

/// Iterative hard thresholding from x0 = 0. Throws SolverDiverged when the
/// residual grows past 10x its starting value.
SparseSolution iht(const SparseProblem& problem, IhtOptions options = {});

/// Keep the k largest-magnitude entries; among equal magnitudes the lower
/// index is kept.
CVector hard_threshold(const CVector& x, int k);

/// Power-iteration estimate of the largest singular value.
double operator_norm(const LinearOperator& op, int iterations = 20);

struct MatrixSparseSolution {
  /// (column of A, column of B) pairs.
  std::vector<std::pair<Index, Index>> support;
  CVector values;
  double residual_norm = 0.0;
  int iterations = 0;
  std::vector<double> residual_history;

  CMatrix dense(Index rows, Index cols) const;
};

/// Greedy recovery of a sparse S from X = A S B^T. Each step picks the pair
/// (i, j) maximizing |a_i^H X conj(b_j)| / (||a_i|| ||b_j||) and refits all
/// selected pairs jointly by least squares.
MatrixSparseSolution omp_matrix(const CMatrix& left, const CMatrix& right, const CMatrix& observation,
                                int sparsity, double tol = -1.0);

}  // namespace xradar::cs
