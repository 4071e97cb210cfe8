#include "xradar/cs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace xradar::cs {

CVector LinearOperator::column(Index j) const {
  CVector e = CVector::Zero(cols());
  e(j) = 1.0;
  return apply(e);
}

RVector LinearOperator::column_norms() const {
  RVector n(cols());
  for (Index j = 0; j < cols(); ++j) n(j) = column(j).norm();
  return n;
}

CVector SparseSolution::dense(Index n) const {
  CVector x = CVector::Zero(n);
  for (std::size_t i = 0; i < support.size(); ++i) x(support[i]) = values(static_cast<Index>(i));
  return x;
}

CMatrix MatrixSparseSolution::dense(Index rows, Index cols) const {
  CMatrix s = CMatrix::Zero(rows, cols);
  for (std::size_t i = 0; i < support.size(); ++i)
    s(support[i].first, support[i].second) = values(static_cast<Index>(i));
  return s;
}

namespace {

// Index of the largest score; the first one wins ties.
Index argmax_first(const RVector& scores) {
  Index best = -1;
  double best_score = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < scores.size(); ++i) {
    if (scores(i) > best_score) {
      best_score = scores(i);
      best = i;
    }
  }
  return best;
}

}  // namespace

SparseSolution omp(const SparseProblem& problem) {
  const LinearOperator& a = problem.sensing;
  const CVector& z = problem.observation;
  if (z.size() != a.rows()) throw std::invalid_argument("omp: observation length does not match operator rows");
  if (problem.sparsity < 1) throw std::invalid_argument("omp: sparsity must be >= 1");
  if (problem.sparsity > a.rows()) throw std::invalid_argument("omp: sparsity exceeds the number of measurements");

  const double z_norm = z.norm();
  const double tol = problem.tol < 0.0 ? 1e-9 * z_norm : problem.tol;

  SparseSolution sol;
  sol.values.resize(0);
  sol.residual_norm = z_norm;
  if (z_norm == 0.0) return sol;

  const RVector norms = a.column_norms();
  std::vector<bool> used(static_cast<std::size_t>(a.cols()), false);
  CMatrix atoms(a.rows(), 0);
  CVector residual = z;

  for (int it = 0; it < problem.sparsity && sol.residual_norm > tol; ++it) {
    const CVector corr = a.adjoint(residual);
    RVector scores(corr.size());
    for (Index i = 0; i < corr.size(); ++i) {
      const bool usable = norms(i) > 0.0 && !used[static_cast<std::size_t>(i)];
      scores(i) = usable ? std::abs(corr(i)) / norms(i) : -1.0;
    }
    const Index pick = argmax_first(scores);
    if (pick < 0 || scores(pick) < 0.0) break;

    atoms.conservativeResize(Eigen::NoChange, atoms.cols() + 1);
    atoms.col(atoms.cols() - 1) = a.column(pick);
    Eigen::ColPivHouseholderQR<CMatrix> qr(atoms);
    if (qr.rank() < atoms.cols()) {
      throw RankDeficientSupport("omp: support submatrix is rank deficient after adding column " +
                                     std::to_string(pick),
                                 sol);
    }
    used[static_cast<std::size_t>(pick)] = true;
    sol.support.push_back(pick);
    sol.values = qr.solve(z);
    residual = z - atoms * sol.values;
    sol.residual_norm = residual.norm();
    sol.residual_history.push_back(sol.residual_norm);
    sol.iterations = it + 1;
  }
  return sol;
}

CVector hard_threshold(const CVector& x, int k) {
  if (k < 0 || k > x.size()) throw std::invalid_argument("hard_threshold: k must lie in [0, len(x)]");
  std::vector<Index> order(static_cast<std::size_t>(x.size()));
  for (Index i = 0; i < x.size(); ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](Index lhs, Index rhs) { return std::abs(x(lhs)) > std::abs(x(rhs)); });
  CVector out = CVector::Zero(x.size());
  for (int i = 0; i < k; ++i) {
    const Index j = order[static_cast<std::size_t>(i)];
    out(j) = x(j);
  }
  return out;
}

double operator_norm(const LinearOperator& op, int iterations) {
  // Deterministic start vector; all-ones with a slow phase ramp avoids
  // starting orthogonal to the leading singular vector for DFT-like maps.
  CVector v(op.cols());
  for (Index i = 0; i < v.size(); ++i) v(i) = std::polar(1.0, 0.37 * static_cast<double>(i));
  v.normalize();
  double sigma = 0.0;
  for (int it = 0; it < iterations; ++it) {
    CVector w = op.adjoint(op.apply(v));
    const double n = w.norm();
    if (n == 0.0) return 0.0;
    sigma = std::sqrt(n);
    v = w / n;
  }
  return sigma;
}

SparseSolution iht(const SparseProblem& problem, IhtOptions options) {
  const LinearOperator& a = problem.sensing;
  const CVector& z = problem.observation;
  if (z.size() != a.rows()) throw std::invalid_argument("iht: observation length does not match operator rows");
  if (problem.sparsity < 1 || problem.sparsity > a.cols())
    throw std::invalid_argument("iht: sparsity must lie in [1, cols]");

  double step = options.step;
  if (step <= 0.0) {
    const double sigma = operator_norm(a);
    if (sigma == 0.0) throw std::invalid_argument("iht: zero operator");
    step = 0.9 / (sigma * sigma);
  }

  SparseSolution sol;
  CVector x = CVector::Zero(a.cols());
  const double start = z.norm();
  sol.residual_norm = start;
  for (int it = 0; it < options.max_iters; ++it) {
    const CVector grad = a.adjoint(z - a.apply(x));
    CVector next = hard_threshold(x + step * grad, problem.sparsity);
    const double delta = (next - x).norm();
    if (delta < options.tol) break;
    x = std::move(next);
    sol.iterations = it + 1;
    sol.residual_norm = (z - a.apply(x)).norm();
    if (sol.residual_norm > 10.0 * start && start > 0.0)
      throw SolverDiverged("iht: residual grew more than 10x; reduce the step size");
  }
  for (Index i = 0; i < x.size(); ++i)
    if (x(i) != Complex(0.0)) sol.support.push_back(i);
  sol.values.resize(static_cast<Index>(sol.support.size()));
  for (std::size_t i = 0; i < sol.support.size(); ++i) sol.values(static_cast<Index>(i)) = x(sol.support[i]);
  return sol;
}

MatrixSparseSolution omp_matrix(const CMatrix& left, const CMatrix& right, const CMatrix& observation,
                                int sparsity, double tol) {
  if (observation.rows() != left.rows() || observation.cols() != right.rows())
    throw std::invalid_argument("omp_matrix: observation must be rows(A) x rows(B)");
  if (sparsity < 1) throw std::invalid_argument("omp_matrix: sparsity must be >= 1");
  if (sparsity > observation.size())
    throw std::invalid_argument("omp_matrix: sparsity exceeds the number of measurements");

  const double x_norm = observation.norm();
  if (tol < 0.0) tol = 1e-9 * x_norm;

  MatrixSparseSolution sol;
  sol.residual_norm = x_norm;
  if (x_norm == 0.0) return sol;

  const RVector left_norms = left.colwise().norm().transpose();
  const RVector right_norms = right.colwise().norm().transpose();
  const Index rows = observation.rows();
  const Index cols = observation.cols();
  const Eigen::Map<const CVector> target(observation.data(), observation.size());

  std::vector<bool> used(static_cast<std::size_t>(left.cols() * right.cols()), false);
  CMatrix atoms(observation.size(), 0);
  CMatrix residual = observation;

  for (int it = 0; it < sparsity && sol.residual_norm > tol; ++it) {
    const CMatrix corr = left.adjoint() * residual * right.conjugate();
    Index bi = -1;
    Index bj = -1;
    double best = -1.0;
    for (Index j = 0; j < corr.cols(); ++j) {
      for (Index i = 0; i < corr.rows(); ++i) {
        const double denom = left_norms(i) * right_norms(j);
        if (denom == 0.0 || used[static_cast<std::size_t>(i + j * left.cols())]) continue;
        const double score = std::abs(corr(i, j)) / denom;
        if (score > best) {
          best = score;
          bi = i;
          bj = j;
        }
      }
    }
    if (bi < 0) break;

    const CMatrix atom = left.col(bi) * right.col(bj).transpose();
    atoms.conservativeResize(Eigen::NoChange, atoms.cols() + 1);
    atoms.col(atoms.cols() - 1) = Eigen::Map<const CVector>(atom.data(), atom.size());
    Eigen::ColPivHouseholderQR<CMatrix> qr(atoms);
    if (qr.rank() < atoms.cols()) {
      SparseSolution partial;
      throw RankDeficientSupport("omp_matrix: support submatrix is rank deficient", partial);
    }
    used[static_cast<std::size_t>(bi + bj * left.cols())] = true;
    sol.support.emplace_back(bi, bj);
    sol.values = qr.solve(CVector(target));
    const CVector fit = atoms * sol.values;
    residual = observation - Eigen::Map<const CMatrix>(fit.data(), rows, cols);
    sol.residual_norm = residual.norm();
    sol.residual_history.push_back(sol.residual_norm);
    sol.iterations = it + 1;
  }
  return sol;
}

}  // namespace xradar::cs
