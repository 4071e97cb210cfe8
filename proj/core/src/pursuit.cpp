#include "pursuit.hpp"

#include <algorithm>
#include <cmath>

namespace xradar::detail {

namespace {

// Largest |corr| outside `exclude`; first index wins ties.
Index best_atom(const CVector& corr, const std::vector<Index>& exclude, const std::vector<Index>& banned) {
  Index best = -1;
  double best_mag = -1.0;
  for (Index i = 0; i < corr.size(); ++i) {
    const double m = std::abs(corr(i));
    if (m <= best_mag) continue;
    if (std::find(exclude.begin(), exclude.end(), i) != exclude.end()) continue;
    if (std::find(banned.begin(), banned.end(), i) != banned.end()) continue;
    best_mag = m;
    best = i;
  }
  return best;
}

}  // namespace

bool least_squares(const GridDictionary& dict, const std::vector<Index>& support, const CVector& data, CVector& values,
                   CVector& residual) {
  CMatrix atoms(dict.measurements(), static_cast<Index>(support.size()));
  for (std::size_t i = 0; i < support.size(); ++i) atoms.col(static_cast<Index>(i)) = dict.atom(support[i]);
  Eigen::ColPivHouseholderQR<CMatrix> qr(atoms);
  if (qr.rank() < atoms.cols()) return false;
  values = qr.solve(data);
  residual = data - atoms * values;
  return true;
}

PursuitResult run_pursuit(const GridDictionary& dict, const CVector& data, int sparsity, const PursuitOptions& options) {
  PursuitResult out;
  out.residual = data;
  out.values.resize(0);
  const double data_norm = data.norm();
  const double tol = options.tol < 0.0 ? 1e-9 * data_norm : options.tol;
  if (data_norm == 0.0 || sparsity < 1) return out;

  const double norm_sq = dict.atom_norm_sq();
  std::vector<Index> banned;
  std::vector<Complex> mp_values;
  while (static_cast<int>(out.support.size()) < sparsity && out.residual.norm() > tol) {
    const CVector corr = dict.correlate(out.residual);
    const Index pick = best_atom(corr, out.support, banned);
    if (pick < 0 || std::abs(corr(pick)) <= 1e-14 * data_norm * std::sqrt(norm_sq)) break;
    ++out.iterations;

    const Complex alpha = corr(pick) / norm_sq;
    std::vector<Index> trial = out.support;
    trial.push_back(pick);
    if (options.refit) {
      CVector values;
      CVector residual;
      if (!least_squares(dict, trial, data, values, residual)) {
        banned.push_back(pick);
        continue;
      }
      out.support = std::move(trial);
      out.values = std::move(values);
      out.residual = std::move(residual);
    } else {
      out.residual -= alpha * dict.atom(pick);
      out.support = std::move(trial);
      mp_values.push_back(alpha);
    }
  }
  if (!options.refit) {
    out.values.resize(static_cast<Index>(mp_values.size()));
    for (std::size_t i = 0; i < mp_values.size(); ++i) out.values(static_cast<Index>(i)) = mp_values[i];
    return out;
  }

  if (!options.polish || out.support.size() < 1) return out;
  double current = out.residual.norm();
  const int max_passes = 4 * sparsity + 4;
  for (int pass = 0; pass < max_passes && current > tol; ++pass) {
    bool improved = false;
    for (std::size_t i = 0; i < out.support.size() && !improved; ++i) {
      std::vector<Index> reduced = out.support;
      reduced.erase(reduced.begin() + static_cast<std::ptrdiff_t>(i));
      CVector values;
      CVector residual = data;
      if (!reduced.empty() && !least_squares(dict, reduced, data, values, residual)) continue;
      const CVector corr = dict.correlate(residual);
      const Index pick = best_atom(corr, out.support, {});
      if (pick < 0) continue;
      reduced.insert(reduced.begin() + static_cast<std::ptrdiff_t>(i), pick);
      CVector new_values;
      CVector new_residual;
      if (!least_squares(dict, reduced, data, new_values, new_residual)) continue;
      const double candidate = new_residual.norm();
      if (candidate < current * (1.0 - 1e-9)) {
        out.support = std::move(reduced);
        out.values = std::move(new_values);
        out.residual = std::move(new_residual);
        current = candidate;
        improved = true;
        ++out.iterations;
      }
    }
    if (!improved) break;
  }
  return out;
}

namespace {

class ExactSearch {
 public:
  ExactSearch(const CMatrix& atoms, double tol, long long& budget)
      : atoms_(atoms), tol_sq_(tol * tol), budget_(budget), norms_(atoms.colwise().squaredNorm().transpose()) {}

  // Depth-first over prefixes of `depth` atoms; the last atom of a support is
  // found from the correlation with the residual projected off the prefix.
  bool search(const CVector& residual, const CMatrix& basis, const CMatrix& gram, Index first, int depth,
              std::vector<Index>& prefix, Index& last) {
    if (--budget_ < 0) return false;
    if (depth == 0) {
      const CVector corr = atoms_.adjoint() * residual;
      const double energy = residual.squaredNorm();
      for (Index i = first; i < atoms_.cols(); ++i) {
        double n = norms_(i);
        if (gram.cols() > 0) n -= gram.row(i).squaredNorm();
        if (n <= 1e-10 * norms_(i)) continue;
        if (energy - std::norm(corr(i)) / n <= tol_sq_) {
          last = i;
          return true;
        }
      }
      return false;
    }
    for (Index i = first; i + depth < atoms_.cols(); ++i) {
      CVector v = atoms_.col(i);
      if (basis.cols() > 0) v -= basis * (basis.adjoint() * v);
      const double vn = v.norm();
      if (vn * vn <= 1e-10 * norms_(i)) continue;
      v /= vn;
      CMatrix next_basis(basis.rows(), basis.cols() + 1);
      next_basis << basis, v;
      CMatrix next_gram(atoms_.cols(), gram.cols() + 1);
      next_gram << gram, atoms_.adjoint() * v;
      const CVector next_residual = residual - v * v.dot(residual);
      prefix.push_back(i);
      if (search(next_residual, next_basis, next_gram, i + 1, depth - 1, prefix, last)) return true;
      prefix.pop_back();
      if (budget_ < 0) return false;
    }
    return false;
  }

 private:
  const CMatrix& atoms_;
  double tol_sq_;
  long long& budget_;
  RVector norms_;
};

}  // namespace

bool exact_fit(const CMatrix& atoms, const CVector& data, int max_sparsity, double tol, long long& budget,
               ExactFit& fit) {
  fit = {};
  if (data.norm() <= tol) {
    fit.values.resize(0);
    return true;
  }
  ExactSearch search(atoms, tol, budget);
  const CMatrix empty(atoms.rows(), 0);
  const CMatrix empty_gram(atoms.cols(), 0);
  for (int size = 1; size <= std::min<Index>(max_sparsity, atoms.cols()); ++size) {
    std::vector<Index> prefix;
    Index last = -1;
    if (search.search(data, empty, empty_gram, 0, size - 1, prefix, last)) {
      prefix.push_back(last);
      CMatrix sub(atoms.rows(), static_cast<Index>(prefix.size()));
      for (std::size_t i = 0; i < prefix.size(); ++i) sub.col(static_cast<Index>(i)) = atoms.col(prefix[i]);
      fit.support = std::move(prefix);
      fit.values = sub.colPivHouseholderQr().solve(data);
      return true;
    }
    if (budget < 0) return false;
  }
  return false;
}

bool blockwise_exact_fit(const CMatrix& atoms, const std::vector<CVector>& blocks, int max_total, double rel_tol,
                         double empty_tol, long long budget, std::vector<ExactFit>& fits) {
  fits.assign(blocks.size(), ExactFit{});
  int occupied = 0;
  for (const CVector& b : blocks)
    if (b.norm() > empty_tol) ++occupied;
  if (occupied > max_total) return false;
  int used = 0;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const double norm = blocks[i].norm();
    if (norm <= empty_tol) continue;
    --occupied;
    const int allowed = max_total - used - occupied;
    if (!exact_fit(atoms, blocks[i], allowed, rel_tol * norm, budget, fits[i])) return false;
    used += static_cast<int>(fits[i].support.size());
  }
  return true;
}

}  // namespace xradar::detail
