#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "xradar/fft.hpp"
#include "xradar/mimo.hpp"
#include "xradar/synth.hpp"

using namespace xradar;
using Catch::Approx;

namespace {

CVector random_spectrum(Rng& rng, int n) {
  CVector h(n);
  for (int i = 0; i < n; ++i) h(i) = rng.complex_normal(1.0);
  return h;
}

double rel_err(const CMatrix& a, const CMatrix& b) { return (a - b).norm() / std::max(1e-300, b.norm()); }

}  // namespace

TEST_CASE("fourier_coeffs - single target at the origin") {
  const RadarParams p = RadarParams::make(1.0, 16, 1e9, 4);
  const TargetScene scene{{Target{}}};
  const auto x = fourier_coeffs(scene, p, flat_spectrum(16), PulseSchedule::uniform(4), BandSelection::full(16));
  REQUIRE(x.num_channels() == 1);
  CHECK((x.channels[0] - CMatrix::Ones(4, 16)).norm() < 1e-14);
}

TEST_CASE("fourier_coeffs - quarter-PRI delay gives a period-4 phase ramp") {
  const RadarParams p = RadarParams::make(1.0, 100, 1e9, 3);
  const TargetScene scene{{Target{0.25, 0.0, 0.0, {1.0, 0.0}}}};
  const auto x = fourier_coeffs(scene, p, flat_spectrum(100), PulseSchedule::uniform(3), BandSelection::full(100));
  const Complex ramp[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
  for (int f = 0; f < 3; ++f)
    for (int k = 0; k < 100; ++k) CHECK(std::abs(x.channels[0](f, k) - ramp[k % 4]) < 1e-12);
}

TEST_CASE("fourier_coeffs - matches the direct sum on random selections") {
  Rng rng(17);
  const RadarParams p = RadarParams::make(2e-4, 5e5, 1e10, 8);
  const PulseSpectrum h{random_spectrum(rng, 100), "rand"};
  const GridSpec g = GridSpec::for_params(p);
  for (int trial = 0; trial < 10; ++trial) {
    TargetScene scene;
    for (int l = 0; l < 4; ++l)
      scene.targets.push_back(Target{rng.uniform(0.0, p.pri_s), rng.uniform(-kPi, kPi) / p.pri_s, 0.0,
                                     rng.complex_normal(1.0)});
    const BandSelection sel = BandSelection::random(100, 20, rng);
    const PulseSchedule sched = PulseSchedule::random_nonuniform(8, 5, rng);
    const auto x = fourier_coeffs(scene, p, h, sched, sel);
    const CMatrix ref = oracle::fourier_coeffs(scene, p, h.coeffs, sched.slots, sel.kappa);
    CHECK(rel_err(x.channels[0], ref) < 1e-10);
  }
  (void)g;
}

TEST_CASE("fourier_coeffs - inverse DFT equals time-domain synthesis") {
  Rng rng(21);
  const RadarParams p = RadarParams::make(1e-4, 4e5, 1e10, 6);
  const PulseSpectrum h{random_spectrum(rng, 40), "rand"};
  const GridSpec g = GridSpec::for_params(p);
  const TargetScene scene = scene_from_bins(oracle::random_cells(rng, 3, 40, 6), g, p);
  const CMatrix samples = nyquist_time_samples(scene, p, h, PulseSchedule::uniform(6));
  for (int t = 0; t < 6; ++t) {
    const CVector ref = oracle::time_frame(scene, p, h.coeffs, t);
    CHECK((samples.row(t).transpose() - ref).norm() / ref.norm() < 1e-9);
  }
}

TEST_CASE("nyquist_time_samples - flat spectrum target at zero delay") {
  const RadarParams p = RadarParams::make(1.0, 8, 1e9, 2);
  const CMatrix s = nyquist_time_samples({{Target{}}}, p, flat_spectrum(8), PulseSchedule::uniform(2));
  for (int f = 0; f < 2; ++f) {
    CHECK(std::abs(s(f, 0) - Complex(8.0)) < 1e-12);
    CHECK(s.row(f).tail(7).norm() < 1e-12);
  }
  CHECK(nyquist_time_samples({}, p, flat_spectrum(8), PulseSchedule::uniform(2)).norm() == 0.0);
}

TEST_CASE("nyquist_time_samples - DFT round trip on 50 scenes") {
  Rng rng(99);
  const RadarParams p = RadarParams::make(1e-4, 6.4e5, 1e10, 16);
  const PulseSpectrum h{random_spectrum(rng, 64), "rand"};
  for (int trial = 0; trial < 50; ++trial) {
    TargetScene scene;
    const int l = 1 + static_cast<int>(rng.below(5));
    for (int i = 0; i < l; ++i)
      scene.targets.push_back(Target{rng.uniform(0.0, p.pri_s), rng.uniform(-kPi, kPi) / p.pri_s, 0.0,
                                     rng.complex_normal(1.0)});
    const auto sched = PulseSchedule::uniform(16);
    const CMatrix time = nyquist_time_samples(scene, p, h, sched);
    const auto x = fourier_coeffs(scene, p, h, sched, BandSelection::full(64));
    CHECK(rel_err(fft::forward_rows(time) / 64.0, x.channels[0]) < 1e-10);
    // Parseval per frame.
    for (int f = 0; f < 16; ++f)
      CHECK(time.row(f).squaredNorm() == Approx(64.0 * x.channels[0].row(f).squaredNorm()).epsilon(1e-9));
  }
}

TEST_CASE("fourier_coeffs - linear in the scene") {
  Rng rng(5);
  const RadarParams p = RadarParams::make(1.0, 32, 1e9, 6);
  const PulseSpectrum h{random_spectrum(rng, 32), "rand"};
  const Target a{0.3, 0.7, 0.0, {1.0, 2.0}};
  const Target b{0.81, -1.9, 0.0, {-0.5, 0.1}};
  const BandSelection sel = BandSelection::random(32, 9, rng);
  std::vector<PulseSchedule> schedules{PulseSchedule::uniform(6), PulseSchedule::nonuniform(6, {0, 2, 5}),
                                       PulseSchedule::random_phase_coded(6, 1, rng)};
  for (const auto& s : schedules) {
    const CMatrix both = fourier_coeffs({{a, b}}, p, h, s, sel).channels[0];
    const CMatrix sum = fourier_coeffs({{a}}, p, h, s, sel).channels[0] + fourier_coeffs({{b}}, p, h, s, sel).channels[0];
    CHECK((both - sum).norm() < 1e-12 * both.norm());
  }
}

TEST_CASE("fourier_coeffs - reductions to the uniform train are bit-identical") {
  Rng rng(8);
  const RadarParams p = RadarParams::make(1.0, 32, 1e9, 7);
  const PulseSpectrum h{random_spectrum(rng, 32), "rand"};
  TargetScene scene{{Target{0.41, 1.3, 0.0, {0.3, -1.0}}, Target{0.07, -2.2, 0.0, {1.0, 0.0}}}};
  const BandSelection sel = BandSelection::random(32, 11, rng);
  const CMatrix uni = fourier_coeffs(scene, p, h, PulseSchedule::uniform(7), sel).channels[0];
  const CMatrix coded = fourier_coeffs(scene, p, h, PulseSchedule::phase_coded(std::vector<double>(7, 0.0), 1), sel).channels[0];
  const CMatrix nonuni = fourier_coeffs(scene, p, h, PulseSchedule::nonuniform(7, {0, 1, 2, 3, 4, 5, 6}), sel).channels[0];
  CHECK(coded == uni);
  CHECK(nonuni == uni);
}

TEST_CASE("fourier_coeffs - phase-coded folding and codes") {
  const RadarParams p = RadarParams::make(1.0, 16, 1e9, 5);
  const std::vector<double> phases{0.1, 0.7, 2.0, 3.5, 5.9};
  const auto sched = PulseSchedule::phase_coded(phases, 3);
  CHECK(sched.num_frames() == 7);
  const Target t{2.25, 0.4, 0.0, {1.0, 0.0}};
  const auto x = fourier_coeffs({{t}}, p, flat_spectrum(16), sched, BandSelection::full(16));
  REQUIRE(x.num_frames() == 7);
  CHECK(x.channels[0].topRows(2).norm() == 0.0);
  for (int pulse = 0; pulse < 5; ++pulse)
    for (int k = 0; k < 16; ++k) {
      const Complex expect = oracle::cis(phases[pulse]) * oracle::cis(-oracle::kTwoPi * k * 0.25) *
                             oracle::cis(-0.4 * (pulse + 2));
      CHECK(std::abs(x.channels[0](pulse + 2, k) - expect) < 1e-12);
    }
  CHECK_THROWS_AS(fourier_coeffs({{Target{3.0, 0.0, 0.0, {1.0, 0.0}}}}, p, flat_spectrum(16), sched,
                                 BandSelection::full(16)),
                  std::invalid_argument);
  CHECK_THROWS_AS(PulseSchedule::phase_coded(phases, 5).validate(), std::invalid_argument);
}

TEST_CASE("fourier_coeffs - rejects bad input") {
  const RadarParams p = RadarParams::make(1.0, 16, 1e9, 4);
  const auto sched = PulseSchedule::uniform(4);
  CHECK_THROWS_AS(fourier_coeffs({{Target{1.0, 0.0, 0.0, {1.0, 0.0}}}}, p, flat_spectrum(16), sched,
                                 BandSelection::full(16)),
                  std::invalid_argument);
  CHECK_THROWS_AS(fourier_coeffs({{Target{0.1, 0.0, 0.0, {0.0, 0.0}}}}, p, flat_spectrum(16), sched,
                                 BandSelection::full(16)),
                  std::invalid_argument);
  CHECK_THROWS_AS(fourier_coeffs({}, p, flat_spectrum(8), sched, BandSelection::full(16)), std::invalid_argument);
  CHECK_THROWS_AS(fourier_coeffs({}, p, flat_spectrum(16), PulseSchedule::uniform(5), BandSelection::full(16)),
                  std::invalid_argument);
}

TEST_CASE("BandSelection - strategies") {
  Rng rng(2);
  const auto r = BandSelection::random(100, 10, rng);
  CHECK(r.size() == 10);
  CHECK_NOTHROW(r.validate());
  const auto c = BandSelection::consecutive(100, 10, 5);
  CHECK(c.kappa.front() == 5);
  CHECK(c.kappa.back() == 14);
  const auto m = BandSelection::multiband(100, 22, 4, rng);
  CHECK(m.size() == 22);
  CHECK_NOTHROW(m.validate());
  int runs = 1;
  for (std::size_t i = 1; i < m.kappa.size(); ++i)
    if (m.kappa[i] != m.kappa[i - 1] + 1) ++runs;
  CHECK(runs <= 4);
  CHECK_THROWS_AS(BandSelection::custom(10, {3, 3}), std::invalid_argument);
  CHECK_THROWS_AS(BandSelection::consecutive(10, 5, 7), std::invalid_argument);
  CHECK(band_strategy_from_string(to_string(BandStrategy::multiband)) == BandStrategy::multiband);
}

TEST_CASE("add_noise - infinite SNR is the identity") {
  const RadarParams p = RadarParams::make(1.0, 16, 1e9, 4);
  const auto x = fourier_coeffs({{Target{0.2, 0.1, 0.0, {1.0, 0.0}}}}, p, flat_spectrum(16), PulseSchedule::uniform(4),
                                BandSelection::full(16));
  CHECK(add_noise(x, std::numeric_limits<double>::infinity(), 1).channels[0] == x.channels[0]);
}

TEST_CASE("add_noise - zero signal is rejected") {
  const RadarParams p = RadarParams::make(1.0, 16, 1e9, 4);
  const auto x = fourier_coeffs({}, p, flat_spectrum(16), PulseSchedule::uniform(4), BandSelection::full(16));
  CHECK_THROWS_AS(add_noise(x, 10.0, 1), std::invalid_argument);
}

TEST_CASE("add_noise - empirical noise power at 0 dB") {
  const RadarParams p = RadarParams::make(1.0, 1000, 1e9, 1000);
  const auto x = fourier_coeffs({{Target{0.123, 0.5, 0.0, {1.0, 0.0}}}}, p, flat_spectrum(1000),
                                PulseSchedule::uniform(1000), BandSelection::full(1000));
  REQUIRE(x.channels[0].size() == 1000000);
  const auto y = add_noise(x, 0.0, 77);
  const double ratio = (y.channels[0] - x.channels[0]).squaredNorm() / x.channels[0].squaredNorm();
  CHECK(ratio >= 0.99);
  CHECK(ratio <= 1.01);
  CHECK(add_noise(x, 0.0, 77).channels[0] == y.channels[0]);
}

TEST_CASE("sfr_phase_detector - examples") {
  const CVector ones = sfr_phase_detector({{Target{}}}, 1e9, 1e6, 8, 1e-4);
  CHECK((ones - CVector::Ones(8)).norm() < 1e-12);

  // A single static target is a pure tone in p at delta_f * tau cycles per pulse.
  const double tau = 2.5e-7;
  const CVector tone = sfr_phase_detector({{Target{tau, 0.0, 0.0, {1.0, 0.0}}}}, 1e9, 1e6, 8, 1e-4);
  for (int i = 1; i < 8; ++i) CHECK(std::abs(tone(i) / tone(i - 1) - oracle::cis(oracle::kTwoPi * 1e6 * tau)) < 1e-9);

  const Target a{3.1e-7, 40.0, 0.0, {1.0, 0.5}};
  const Target b{7.7e-7, -25.0, 0.0, {-0.2, 0.9}};
  const CVector y = sfr_phase_detector({{a, b}}, 2e9, 1.5e6, 12, 1e-4);
  for (int i = 0; i < 12; ++i) {
    const double fp = 2e9 + i * 1.5e6;
    const Complex ref = a.amplitude * oracle::cis(oracle::kTwoPi * fp * a.delay_s + a.doppler_rad_s * i * 1e-4) +
                        b.amplitude * oracle::cis(oracle::kTwoPi * fp * b.delay_s + b.doppler_rad_s * i * 1e-4);
    CHECK(std::abs(y(i) - ref) < 1e-6);
  }
}

TEST_CASE("mimo_fourier_coeffs - single channel at the origin reduces to fourier_coeffs") {
  const RadarParams p = RadarParams::make(1.0, 32, 1e9, 6);
  ArrayGeometry array;
  array.tx_positions = {0.0};
  array.rx_positions = {0.0};
  array.carriers_hz = {0.0};
  Rng rng(4);
  const BandSelection sel = BandSelection::random(32, 8, rng);
  const MimoScene ms{{MimoTarget{0.3, 0.4, 0.2, {1.0, -1.0}}}};
  const auto x = mimo_fourier_coeffs(ms, p, array, {flat_spectrum(32)}, {sel});
  // f_D in Hz with e^{+j 2 pi fD p pri} equals nu = -2 pi fD.
  const auto ref = fourier_coeffs({{Target{0.3, -kTwoPi * 0.2, 0.0, {1.0, -1.0}}}}, p, flat_spectrum(32),
                                  PulseSchedule::uniform(6), sel);
  CHECK((x.channels[0] - ref.channels[0]).norm() < 1e-12);
}

TEST_CASE("mimo_fourier_coeffs - broadside targets give identical channels") {
  const RadarParams p = RadarParams::make(1.0, 32, 1e9, 4);
  const ArrayGeometry array = make_array(5, 3, 3, 2, ArrayMode::random, 9);
  const MimoScene ms{{MimoTarget{0.3, 0.0, 0.1, {1.0, 0.0}}, MimoTarget{0.7, 0.0, -0.2, {0.0, 1.0}}}};
  Rng rng(1);
  const BandSelection sel = BandSelection::random(32, 6, rng);
  std::vector<PulseSpectrum> spectra(3, flat_spectrum(32));
  const auto x = mimo_fourier_coeffs(ms, p, array, spectra, {sel});
  REQUIRE(x.num_channels() == 6);
  for (int ch = 1; ch < 6; ++ch) CHECK((x.channels[ch] - x.channels[0]).norm() < 1e-12);
}

TEST_CASE("mimo_fourier_coeffs - steering phase per channel") {
  const RadarParams p = RadarParams::make(1.0, 16, 1e9, 2);
  ArrayGeometry array = make_array(4, 2, 2, 2, ArrayMode::random, 3);
  array.carriers_hz = fdma_carriers(2, 0.0, 2e7, 1.6e7);
  const MimoScene ms{{MimoTarget{0.25, 0.35, 0.0, {1.0, 0.0}}}};
  const auto x = mimo_fourier_coeffs(ms, p, array, {flat_spectrum(16), flat_spectrum(16)}, {BandSelection::full(16)});
  for (int m = 0; m < 2; ++m)
    for (int q = 0; q < 2; ++q) {
      const double lambda = kSpeedOfLight / 1e9;
      const double beta = (array.rx_positions[q] + array.tx_positions[m]) * (array.carriers_hz[m] * lambda / kSpeedOfLight + 1.0);
      const Complex expect = oracle::cis(oracle::kTwoPi * beta * 0.35);
      CHECK(std::abs(x.channels[array.channel(m, q)](0, 0) - expect) < 1e-12);
    }
}
