#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "xradar/geometry.hpp"
#include "xradar/model.hpp"

using namespace xradar;
using Catch::Approx;

namespace {

RadarParams unit_params(int n = 100, int p = 100) { return RadarParams::make(1.0, n, 1e9, p); }

// Nearest grid point by exhaustive search; ties keep the first (lowest) index.
int brute_nearest(double units, int size) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = -2 * size; i <= 3 * size; ++i) {
    const double d = std::abs(units - i);
    if (d < best_d - 1e-12) {
      best_d = d;
      best = i;
    }
  }
  return ((best % size) + size) % size;
}

}  // namespace

TEST_CASE("RadarParams::make - integer bin count") {
  const RadarParams p = RadarParams::make(1e-4, 1e6, 1e10, 32);
  CHECK(p.num_nyquist_bins == 100);
  CHECK(p.cpi_s() == Approx(3.2e-3));
  CHECK(p.delay_step_s() * p.bandwidth_hz == Approx(1.0));
  CHECK_THROWS_AS(RadarParams::make(1e-4, 1.005e6, 1e10, 32), std::invalid_argument);
  CHECK_THROWS_AS(RadarParams::make(0.0, 1e6, 1e10, 32), std::invalid_argument);
  CHECK_THROWS_AS(RadarParams::make(1e-4, 0.0, 1e10, 32), std::invalid_argument);
  CHECK_THROWS_AS(RadarParams::make(1e-4, 1e6, 1e10, 0), std::invalid_argument);
}

TEST_CASE("quantize_scene - origin maps to cell zero") {
  const RadarParams p = unit_params();
  const auto q = quantize_scene({{Target{0.0, 0.0, 0.0, {1.0, 0.0}}}}, GridSpec::for_params(p), p);
  REQUIRE(q.size() == 1);
  CHECK(q[0].delay_bin == 0);
  CHECK(q[0].doppler_bin == 0);
  CHECK_FALSE(q[0].off_grid());
}

TEST_CASE("quantize_scene - exact grid multiples") {
  const RadarParams p = unit_params();
  const auto q = quantize_scene({{Target{0.25, 3.0 * p.doppler_step_rad_s(), 0.0, {1.0, 0.0}}}}, GridSpec::for_params(p), p);
  CHECK(q[0].delay_bin == 25);
  CHECK(q[0].doppler_bin == 3);
}

TEST_CASE("quantize_scene - nearest delay bin matches brute force") {
  const RadarParams p = unit_params();
  const auto q = quantize_scene({{Target{0.2549, 0.0, 0.0, {1.0, 0.0}}}}, GridSpec::for_params(p), p);
  CHECK(q[0].delay_bin == brute_nearest(25.49, 100));
  CHECK(q[0].delay_bin == 25);
  CHECK(q[0].off_grid());

  Rng rng(7);
  for (int i = 0; i < 500; ++i) {
    const double units = rng.uniform(-150.0, 250.0);
    CHECK(quantize_index(units, 100) == brute_nearest(units, 100));
  }
}

TEST_CASE("quantize_index - halves go to the lower index") {
  CHECK(quantize_index(25.5, 100) == 25);
  CHECK(quantize_index(-0.5, 100) == 99);
  CHECK(quantize_index(99.6, 100) == 0);
  CHECK(quantize_index(-3.0, 10) == 7);
}

TEST_CASE("quantize_scene - negative Doppler wraps and round-trips") {
  const RadarParams p = unit_params(64, 32);
  const GridSpec g = GridSpec::for_params(p);
  const auto q = quantize_scene({{Target{0.0, -2.0 * g.doppler_step_rad_s(p), 0.0, {1.0, 0.0}}}}, g, p);
  CHECK(q[0].doppler_bin == 30);
  CHECK(dequantize(q[0], g, p).doppler_rad_s == Approx(-2.0 * g.doppler_step_rad_s(p)));
}

TEST_CASE("quantize_scene - quantize after dequantize is the identity on grid cells") {
  const RadarParams p = unit_params(64, 32);
  const GridSpec g = GridSpec::for_params(p, 16);
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto cells = oracle::random_cells(rng, 5, 64, 32, 1, 16);
    const auto back = quantize_scene(scene_from_bins(cells, g, p), g, p);
    REQUIRE(back.size() == cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      CHECK(back[i].delay_bin == cells[i].delay_bin);
      CHECK(back[i].doppler_bin == cells[i].doppler_bin);
      CHECK(back[i].azimuth_bin == cells[i].azimuth_bin);
      CHECK(back[i].off_grid_bins < 1e-6);
    }
  }
}

TEST_CASE("quantize_scene - collisions and range errors") {
  const RadarParams p = unit_params();
  const GridSpec g = GridSpec::for_params(p);
  TargetScene same{{Target{0.25, 0.0, 0.0, {1.0, 0.0}}, Target{0.2501, 0.0, 0.0, {2.0, 0.0}}}};
  CHECK_THROWS_AS(quantize_scene(same, g, p), QuantizationCollision);
  CHECK_THROWS_AS(quantize_scene({{Target{1.0, 0.0, 0.0, {1.0, 0.0}}}}, g, p), std::invalid_argument);
  CHECK_THROWS_AS(quantize_scene({{Target{-0.1, 0.0, 0.0, {1.0, 0.0}}}}, g, p), std::invalid_argument);
  CHECK_THROWS_AS(quantize_scene({{Target{0.0, 4.0, 0.0, {1.0, 0.0}}}}, g, p), std::invalid_argument);
}

TEST_CASE("quantize_scene - ambiguity order from extended delay") {
  const RadarParams p = unit_params();
  const GridSpec g = GridSpec::for_params(p, 1, 3);
  const auto q = quantize_scene({{Target{2.25, 0.0, 0.0, {1.0, 0.0}}}}, g, p);
  CHECK(q[0].delay_bin == 25);
  CHECK(q[0].ambiguity_order == 2);
  CHECK(dequantize(q[0], g, p).delay_s == Approx(2.25));
}

TEST_CASE("velocity_to_doppler - round trip and scale") {
  const double fc = 10e9;
  const double nu = velocity_to_doppler(15.0, fc);
  CHECK(nu == Approx(kTwoPi * 2.0 * 15.0 * fc / kSpeedOfLight));
  CHECK(doppler_to_velocity(nu, fc) == Approx(15.0));
  CHECK(delay_to_range(range_to_delay(1234.5)) == Approx(1234.5));
}

TEST_CASE("validate_assumptions - static target passes") {
  const RadarParams p = RadarParams::make(1e-4, 1e6, 10e9, 10);
  const TargetScene scene{{Target{5e-5, 0.0, 0.0, {1.0, 0.0}}}};
  CHECK(validate_assumptions(scene, p, 1e-6, 0.0).empty());
}

TEST_CASE("validate_assumptions - short pulse violation") {
  const RadarParams p = RadarParams::make(1e-4, 1e6, 10e9, 10);
  // nu * Tp = 0.5
  const TargetScene scene{{Target{5e-5, 0.5e6, 0.0, {1.0, 0.0}}}};
  const auto v = validate_assumptions(scene, p, 1e-6, 0.0);
  bool found = false;
  for (const auto& x : v)
    if (x.assumption == Assumption::short_pulse) {
      found = true;
      CHECK(x.lhs == Approx(0.5));
      CHECK(x.target == std::size_t{0});
    }
  CHECK(found);
}

TEST_CASE("validate_assumptions - acceleration bound evaluated numerically") {
  const RadarParams p = RadarParams::make(1e-4, 1e6, 10e9, 10);
  const TargetScene scene{{Target{5e-5, 0.0, 0.0, {1.0, 0.0}}}};
  const double cpi = 10 * 1e-4;
  const double bound = 299792458.0 / (2.0 * 10e9 * cpi * cpi);
  CHECK(bound == Approx(14989.6229));
  const auto v = validate_assumptions(scene, p, 1e-6, 1e4);
  REQUIRE(v.size() == 1);
  CHECK(v[0].assumption == Assumption::small_acceleration);
  CHECK(v[0].bound == Approx(bound));
  CHECK(v[0].ratio() == Approx(1e4 / bound));
  CHECK(validate_assumptions(scene, p, 1e-6, 1e3).empty());
  CHECK(to_string(Assumption::small_acceleration) == "small acceleration");
}

TEST_CASE("validate_assumptions - shrinking parameters never adds a violation") {
  const RadarParams p = RadarParams::make(1e-4, 1e6, 10e9, 64, 40.0);
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    TargetScene s{{Target{rng.uniform(0.0, 1e-4), rng.uniform(-3e4, 3e4), 0.0, {1.0, 0.0}}}};
    const double accel = rng.uniform(0.0, 1e4);
    const auto before = validate_assumptions(s, p, 1e-6, accel).size();
    const double shrink = rng.uniform(0.0, 1.0);
    s.targets[0].doppler_rad_s *= shrink;
    RadarParams smaller = p;
    smaller.aperture = *p.aperture * shrink;
    CHECK(validate_assumptions(s, smaller, 1e-6, accel * shrink).size() <= before);
  }
}

TEST_CASE("validate_assumptions - narrowband aperture check") {
  ArrayGeometry array;
  array.virtual_tx = 8;
  array.virtual_rx = 10;
  const RadarParams p = RadarParams::make(1e-4, 1e8, 1e9, 10);
  const TargetScene scene{{Target{5e-5, 0.0, 0.0, {1.0, 0.0}}}};
  // 2 Z lambda / c = 2 * 40 * 0.3 / c = 80 ns vs 1 / B = 10 ns
  const auto v = validate_assumptions(scene, p, 1e-9, 0.0, &array);
  REQUIRE(v.size() == 1);
  CHECK(v[0].assumption == Assumption::narrowband_array);
  CHECK_FALSE(v[0].target.has_value());
}
