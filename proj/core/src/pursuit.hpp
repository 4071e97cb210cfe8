#pragma once

#include <vector>

#include "xradar/types.hpp"

namespace xradar::detail {

/// Grid dictionary with equal-norm atoms and a fast correlation kernel.
/// Measurements and atoms are flattened to one vector.
class GridDictionary {
 public:
  virtual ~GridDictionary() = default;
  virtual Index size() const = 0;
  virtual Index measurements() const = 0;
  /// atom(i)^H residual for every atom i.
  virtual CVector correlate(const CVector& residual) const = 0;
  virtual CVector atom(Index id) const = 0;
  virtual double atom_norm_sq() const = 0;
};

struct PursuitOptions {
  /// Joint least-squares refit of all selected atoms after each subtraction.
  bool refit = true;
  /// Single-atom exchange passes after the greedy stage.
  bool polish = true;
  /// Residual-norm stop; negative selects 1e-9 * ||data||.
  double tol = -1.0;
};

struct PursuitResult {
  std::vector<Index> support;
  CVector values;
  CVector residual;
  int iterations = 0;
};

/// Matching pursuit: pick argmax |a^H r|, amplitude a^H r / ||a||^2, subtract,
/// optionally refit jointly; then optional exchange polish.
PursuitResult run_pursuit(const GridDictionary& dict, const CVector& data, int sparsity, const PursuitOptions& options);

/// Least-squares fit of data on the given atoms; returns false when the
/// atom matrix is rank deficient.
bool least_squares(const GridDictionary& dict, const std::vector<Index>& support, const CVector& data, CVector& values,
                   CVector& residual);

struct ExactFit {
  std::vector<Index> support;
  CVector values;
};

/// Sparsest support over the columns of `atoms` that reproduces `data` to a
/// residual norm <= tol, searching sizes 0..max_sparsity in order and
/// supports lexicographically within a size. Each visited prefix costs one
/// unit of `budget`; returns false when nothing fits or the budget runs out.
bool exact_fit(const CMatrix& atoms, const CVector& data, int max_sparsity, double tol, long long& budget,
               ExactFit& fit);

/// Independent blocks sharing one atom matrix and a total sparsity. Blocks
/// with norm <= empty_tol are empty; every other block must fit to a residual
/// of rel_tol times its norm.
bool blockwise_exact_fit(const CMatrix& atoms, const std::vector<CVector>& blocks, int max_total, double rel_tol,
                         double empty_tol, long long budget, std::vector<ExactFit>& fits);

}  // namespace xradar::detail
