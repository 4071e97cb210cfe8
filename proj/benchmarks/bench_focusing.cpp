#include <benchmark/benchmark.h>

#include "xradar/classic.hpp"
#include "xradar/focusing.hpp"
#include "xradar/synth.hpp"

using namespace xradar;

namespace {

struct Setup {
  RadarParams params;
  XampleSet samples;
  CMatrix frames;
};

// N = 200 Nyquist bins, P pulses, L = 5 random on-grid targets.
Setup make_setup(int pulses, int coeffs) {
  Setup s;
  s.params = RadarParams::make(1e-4, 2e6, 1e10, pulses);
  const GridSpec grid = GridSpec::for_params(s.params);
  Rng rng(7);
  std::vector<QuantizedTarget> cells;
  for (int l = 0; l < 5; ++l)
    cells.push_back(QuantizedTarget{static_cast<int>(rng.below(grid.delay_bins)),
                                    static_cast<int>(rng.below(grid.doppler_bins)), 0, 0,
                                    rng.complex_normal(1.0)});
  const TargetScene scene = scene_from_bins(cells, grid, s.params);
  const PulseSpectrum h = flat_spectrum(grid.delay_bins);
  s.samples = fourier_coeffs(scene, s.params, h, PulseSchedule::uniform(pulses),
                             BandSelection::random(grid.delay_bins, coeffs, rng));
  s.frames = nyquist_time_samples(scene, s.params, h, PulseSchedule::uniform(pulses));
  return s;
}

}  // namespace

static void BM_DopplerFocus(benchmark::State& state) {
  const Setup s = make_setup(static_cast<int>(state.range(0)), 20);
  for (auto _ : state) benchmark::DoNotOptimize(doppler_focus(s.samples));
}
BENCHMARK(BM_DopplerFocus)->Arg(50)->Arg(200);

static void BM_RecoverFocused(benchmark::State& state) {
  const Setup s = make_setup(50, static_cast<int>(state.range(0)));
  const PulseSpectrum h = flat_spectrum(s.params.num_nyquist_bins);
  for (auto _ : state) benchmark::DoNotOptimize(recover_focused(s.samples, h, 5));
}
BENCHMARK(BM_RecoverFocused)->Arg(10)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);

static void BM_RecoverFocusedMatrixOmp(benchmark::State& state) {
  const Setup s = make_setup(50, 20);
  const PulseSpectrum h = flat_spectrum(s.params.num_nyquist_bins);
  FocusOptions opt;
  opt.backend = FocusBackend::matrix_omp;
  for (auto _ : state) benchmark::DoNotOptimize(recover_focused(s.samples, h, 5, opt));
}
BENCHMARK(BM_RecoverFocusedMatrixOmp)->Unit(benchmark::kMillisecond);

static void BM_ClassicRecover(benchmark::State& state) {
  const Setup s = make_setup(50, 20);
  const PulseSpectrum h = flat_spectrum(s.params.num_nyquist_bins);
  for (auto _ : state) benchmark::DoNotOptimize(classic_recover(s.frames, h, s.params.pri_s, 5));
}
BENCHMARK(BM_ClassicRecover)->Unit(benchmark::kMillisecond);
