#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

#include "xradar/types.hpp"

namespace xradar {

/// Portable seeded generator. The engine is std::mt19937_64, whose output
/// sequence is fixed by the standard; the variate transforms below are
/// written out so results do not depend on the standard library's
/// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Seed for an independent stream keyed by (seed, keys...).
  static std::uint64_t derive(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer on [0, n), unbiased.
  std::uint64_t below(std::uint64_t n);

  double normal();

  /// Circular complex Gaussian with E|z|^2 = variance.
  Complex complex_normal(double variance);

  /// k distinct values from [0, n), sorted ascending.
  std::vector<int> sample_sorted(int n, int k);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace xradar
