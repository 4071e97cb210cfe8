#include <benchmark/benchmark.h>

#include "xradar/fft.hpp"
#include "xradar/rng.hpp"

using namespace xradar;

static void BM_FftForward(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(1);
  CVector x(n);
  for (int i = 0; i < n; ++i) x(i) = rng.complex_normal(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(fft::forward(x));
  state.SetComplexityN(n);
}
BENCHMARK(BM_FftForward)->RangeMultiplier(4)->Range(64, 16384)->Complexity(benchmark::oNLogN);

// Prime lengths take the slow path in kissfft.
static void BM_FftForwardPrime(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(2);
  CVector x(n);
  for (int i = 0; i < n; ++i) x(i) = rng.complex_normal(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(fft::forward(x));
}
BENCHMARK(BM_FftForwardPrime)->Arg(101)->Arg(1009)->Arg(4099);
