#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "xradar/mimo.hpp"

using namespace xradar;
using Catch::Approx;

namespace {

struct Planted {
  int delay_bin;
  int doppler_bin;
  int azimuth_bin;
  Complex amplitude;
};

MimoScene mimo_scene(const std::vector<Planted>& cells, const RadarParams& p, int azimuth_bins) {
  const GridSpec g{p.num_nyquist_bins, p.num_pulses, azimuth_bins, 1};
  MimoScene s;
  for (const auto& c : cells)
    s.targets.push_back(MimoTarget{c.delay_bin * p.delay_step_s(), azimuth_bins > 1 ? g.azimuth_sine(c.azimuth_bin) : 0.0,
                                   mimo_doppler_hz(c.doppler_bin, p), c.amplitude});
  return s;
}

std::set<oracle::Cell> cells_of(const std::vector<Planted>& cells) {
  std::set<oracle::Cell> out;
  for (const auto& c : cells) out.emplace(c.delay_bin, c.doppler_bin, 0, c.azimuth_bin);
  return out;
}

}  // namespace

TEST_CASE("make_array - ULA positions") {
  const ArrayGeometry a = make_array(5, 3, 5, 3, ArrayMode::ula);
  CHECK(a.tx_positions == std::vector<double>{0.0, 1.5, 3.0, 4.5, 6.0});
  CHECK(a.rx_positions == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(a.aperture() == 7.5);
  CHECK(a.azimuth_bins() == 15);
  CHECK_NOTHROW(a.validate());
}

TEST_CASE("make_array - random positions inside the aperture") {
  const ArrayGeometry a = make_array(8, 10, 1, 1, ArrayMode::random, 5);
  REQUIRE(a.num_tx() == 1);
  REQUIRE(a.num_rx() == 1);
  CHECK(a.tx_positions[0] >= 0.0);
  CHECK(a.tx_positions[0] <= 40.0);
  CHECK(a.rx_positions[0] <= 40.0);
  const ArrayGeometry b = make_array(8, 10, 3, 4, ArrayMode::random, 77);
  const ArrayGeometry c = make_array(8, 10, 3, 4, ArrayMode::random, 77);
  CHECK(b.tx_positions == c.tx_positions);
  CHECK(b.rx_positions == c.rx_positions);
  CHECK(std::is_sorted(b.rx_positions.begin(), b.rx_positions.end()));
  CHECK_THROWS_AS(make_array(4, 4, 5, 1, ArrayMode::random), std::invalid_argument);
}

TEST_CASE("virtual_positions - full ULA fills the virtual array") {
  for (auto [t, r] : {std::pair{5, 3}, std::pair{8, 10}, std::pair{2, 7}}) {
    const ArrayGeometry a = make_array(t, r, t, r, ArrayMode::ula);
    std::vector<double> expect;
    for (int i = 0; i < t * r; ++i) expect.push_back(0.5 * i);
    CHECK(virtual_positions(a) == expect);
  }
}

TEST_CASE("fdma_carriers - spacing") {
  CHECK(fdma_carriers(3, 0.0, 1e6, 1e6) == std::vector<double>{0.0, 1e6, 2e6});
  CHECK(fdma_carriers(1, 5e6, 0.0, 1e6) == std::vector<double>{5e6});
  CHECK_THROWS_AS(fdma_carriers(2, 0.0, 5e5, 1e6), std::invalid_argument);
}

TEST_CASE("beta_matrix - carrier correction") {
  ArrayGeometry a = make_array(2, 2, 2, 2, ArrayMode::ula);
  a.carriers_hz = {0.0, 1e8};
  const RMatrix exact = beta_matrix(a, 1e9, true);
  const RMatrix approx = beta_matrix(a, 1e9, false);
  CHECK(exact(1, 1) == Approx((1.0 + 0.5) * 1.1));
  CHECK(approx(1, 1) == Approx(1.5));
  CHECK(exact(0, 1) == Approx(0.5));
}

TEST_CASE("mimo_doppler_bin - round trip") {
  const RadarParams p = RadarParams::make(1e-4, 1e6, 1e10, 16);
  for (int r = 0; r < 16; ++r) CHECK(mimo_doppler_bin(mimo_doppler_hz(r, p), p) == r);
  CHECK(azimuth_bin(0.0, 80) == 0);
  CHECK(azimuth_bin(-1.0, 80) == 40);
  CHECK(azimuth_bin(2.0 / 80.0, 80) == 1);
}

TEST_CASE("recover_mimo - single channel matches recover_focused") {
  Rng rng(1);
  const RadarParams p = RadarParams::make(1.0, 32, 1e9, 8);
  ArrayGeometry array;
  array.tx_positions = {0.0};
  array.rx_positions = {0.0};
  array.carriers_hz = {0.0};
  const std::vector<Planted> cells{{4, 6, 0, {1.0, 0.0}}, {19, 1, 0, {0.0, 0.5}}};
  const BandSelection sel = BandSelection::random(32, 10, rng);
  const auto x = mimo_fourier_coeffs(mimo_scene(cells, p, 1), p, array, {flat_spectrum(32)}, {sel});
  const auto m = recover_mimo(x, array, {flat_spectrum(32)}, 2);
  XampleSet single = x;
  const auto f = recover_focused(single, flat_spectrum(32), 2);
  REQUIRE(m.detections.size() == f.detections.size());
  for (std::size_t i = 0; i < f.detections.size(); ++i) {
    CHECK(m.detections[i].delay_bin == f.detections[i].delay_bin);
    CHECK(m.detections[i].doppler_bin == f.detections[i].doppler_bin);
    CHECK(m.detections[i].azimuth_bin == 0);
    CHECK(std::abs(m.detections[i].amplitude - f.detections[i].amplitude) < 1e-9);
  }
  CHECK(cells_of(cells) == oracle::cells_of(m));
}

TEST_CASE("recover_mimo - detections invariant under a global phase") {
  Rng rng(2);
  const RadarParams p = RadarParams::make(1.0, 32, 1e9, 8);
  const ArrayGeometry array = make_array(4, 4, 2, 3, ArrayMode::random, 11);
  const std::vector<Planted> cells{{4, 6, 3, {1.0, 0.0}}, {19, 1, 12, {0.0, 0.8}}};
  std::vector<PulseSpectrum> spectra(2, flat_spectrum(32));
  const BandSelection sel = BandSelection::random(32, 8, rng);
  XampleSet x = mimo_fourier_coeffs(mimo_scene(cells, p, 16), p, array, spectra, {sel});
  const auto base = recover_mimo(x, array, spectra, 2);
  for (auto& c : x.channels) c *= oracle::cis(1.234);
  const auto rotated = recover_mimo(x, array, spectra, 2);
  CHECK(oracle::cells_of(base) == oracle::cells_of(rotated));
  CHECK(oracle::cells_of(base) == cells_of(cells));
}

TEST_CASE("recover_mimo - broadside targets match the channel-summed single pipeline") {
  Rng rng(3);
  const RadarParams p = RadarParams::make(1.0, 32, 1e9, 8);
  const ArrayGeometry array = make_array(4, 4, 2, 2, ArrayMode::random, 12);
  const std::vector<Planted> cells{{7, 2, 0, {1.0, 0.0}}, {25, 5, 0, {-0.6, 0.3}}};
  std::vector<PulseSpectrum> spectra(2, flat_spectrum(32));
  const BandSelection sel = BandSelection::random(32, 8, rng);
  const XampleSet x = mimo_fourier_coeffs(mimo_scene(cells, p, 16), p, array, spectra, {sel});
  const auto m = recover_mimo(x, array, spectra, 2);
  XampleSet summed = x;
  summed.channels = {CMatrix::Zero(x.num_frames(), x.num_coeffs())};
  summed.num_rx = 1;
  for (const auto& c : x.channels) summed.channels[0] += c;
  const auto f = recover_focused(summed, flat_spectrum(32), 2);
  for (const auto& d : m.detections) CHECK(d.azimuth_bin == 0);
  CHECK(oracle::cells_of(m) == oracle::cells_of(f));
}

TEST_CASE("recover_mimo - resolves azimuths one grid step apart") {
  Rng rng(4);
  const RadarParams p = RadarParams::make(1.0, 32, 1e9, 4);
  const ArrayGeometry array = make_array(5, 3, 5, 3, ArrayMode::ula);
  const std::vector<Planted> cells{{10, 1, 4, {1.0, 0.0}}, {10, 1, 5, {0.0, 1.0}}};
  std::vector<PulseSpectrum> spectra(5, flat_spectrum(32));
  const XampleSet x = mimo_fourier_coeffs(mimo_scene(cells, p, 15), p, array, spectra, {BandSelection::full(32)});
  CHECK(oracle::cells_of(recover_mimo(x, array, spectra, 2)) == cells_of(cells));
}

TEST_CASE("recover_mimo - bound-size recovery on well-conditioned draws") {
  Rng rng(5);
  const RadarParams p = RadarParams::make(1.0, 101, 1e9, 4);
  std::vector<PulseSpectrum> spectra(2, flat_spectrum(101));
  MimoOptions opt;
  opt.exact_search = true;
  int tested = 0;
  for (int draw = 0; draw < 10; ++draw) {
    const ArrayGeometry array = make_array(8, 10, 2, 2, ArrayMode::random, rng.next_u64());
    std::vector<Planted> cells;
    std::set<std::pair<int, int>> used;
    while (cells.size() < 2) {
      Planted c{static_cast<int>(rng.below(101)), static_cast<int>(rng.below(4)), static_cast<int>(rng.below(80)),
                oracle::cis(oracle::kTwoPi * rng.uniform())};
      if (used.emplace(c.delay_bin, c.doppler_bin).second) cells.push_back(c);
    }
    const MimoScene scene = mimo_scene(cells, p, 80);
    std::vector<double> sines;
    for (const auto& t : scene.targets) sines.push_back(t.azimuth_sine);
    if (steering_condition(array, sines, p.carrier_hz) >= 1e6) continue;
    ++tested;
    const BandSelection sel = BandSelection::random(101, 2, rng);
    const XampleSet x = mimo_fourier_coeffs(scene, p, array, spectra, {sel});
    CHECK(oracle::cells_of(recover_mimo(x, array, spectra, 2, opt)) == cells_of(cells));
  }
  CHECK(tested >= 8);
}

TEST_CASE("recover_mimo - rejects mismatched geometry") {
  const RadarParams p = RadarParams::make(1.0, 16, 1e9, 4);
  const ArrayGeometry array = make_array(2, 2, 2, 2, ArrayMode::ula);
  std::vector<PulseSpectrum> spectra(2, flat_spectrum(16));
  const XampleSet x = mimo_fourier_coeffs({{MimoTarget{0.5, 0.0, 0.0, {1.0, 0.0}}}}, p, array, spectra,
                                          {BandSelection::full(16)});
  const ArrayGeometry other = make_array(2, 2, 1, 2, ArrayMode::ula);
  CHECK_THROWS_AS(recover_mimo(x, other, {flat_spectrum(16)}, 1), std::invalid_argument);
  CHECK_THROWS_AS(recover_mimo(x, array, spectra, 0), std::invalid_argument);
}
