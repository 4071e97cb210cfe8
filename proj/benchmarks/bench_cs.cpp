#include <benchmark/benchmark.h>

#include "xradar/cs.hpp"
#include "xradar/rng.hpp"

using namespace xradar;

namespace {

CMatrix gaussian(Rng& rng, int rows, int cols) {
  CMatrix a(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) a(i, j) = rng.complex_normal(1.0 / rows);
  return a;
}

}  // namespace

static void BM_Omp(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int k = static_cast<int>(state.range(1));
  Rng rng(3);
  const cs::DenseOperator op(gaussian(rng, n / 4, n));
  CVector x = CVector::Zero(n);
  for (int i = 0; i < k; ++i) x(static_cast<Index>(rng.below(n))) = rng.complex_normal(1.0);
  const CVector z = op.apply(x);
  for (auto _ : state) benchmark::DoNotOptimize(cs::omp(cs::SparseProblem{op, z, k}));
}
BENCHMARK(BM_Omp)->Args({256, 5})->Args({1024, 10})->Args({4096, 20})->Unit(benchmark::kMillisecond);

static void BM_OmpMatrix(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(4);
  const CMatrix a = gaussian(rng, n / 4, n);
  const CMatrix b = gaussian(rng, n / 4, n);
  CMatrix s = CMatrix::Zero(n, n);
  for (int i = 0; i < 5; ++i) s(static_cast<Index>(rng.below(n)), static_cast<Index>(rng.below(n))) = rng.complex_normal(1.0);
  const CMatrix obs = a * s * b.transpose();
  for (auto _ : state) benchmark::DoNotOptimize(cs::omp_matrix(a, b, obs, 5));
}
BENCHMARK(BM_OmpMatrix)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
