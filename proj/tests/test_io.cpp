#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <sstream>

#include "oracles.hpp"
#include "xradar/io.hpp"
#include "xradar/mimo.hpp"

using namespace xradar;
using Catch::Approx;

TEST_CASE("params_to_json - round trip") {
  const RadarParams p = RadarParams::make(1e-4, 1e6, 1e10, 32, 40.0);
  const RadarParams q = io::params_from_json(io::params_to_json(p));
  CHECK(q.pri_s == p.pri_s);
  CHECK(q.bandwidth_hz == p.bandwidth_hz);
  CHECK(q.carrier_hz == p.carrier_hz);
  CHECK(q.num_pulses == 32);
  CHECK(q.num_nyquist_bins == 100);
  CHECK(q.aperture == 40.0);
  CHECK_THROWS_AS(io::params_from_json("{\"pri_s\": 1.0}"), io::FormatError);
  CHECK_THROWS_AS(io::params_from_json("not json"), io::FormatError);
}

TEST_CASE("scene_to_json - round trip and bin input") {
  const RadarParams p = RadarParams::make(1.0, 100, 1e9, 50);
  const TargetScene s{{Target{0.25, 1.5, 0.1, {0.3, -0.4}}, Target{0.7, -2.0, -0.5, {1.0, 0.0}}}};
  const TargetScene t = io::scene_from_json(io::scene_to_json(s), p);
  REQUIRE(t.targets.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(t.targets[i].delay_s == s.targets[i].delay_s);
    CHECK(t.targets[i].doppler_rad_s == s.targets[i].doppler_rad_s);
    CHECK(t.targets[i].azimuth_sine == s.targets[i].azimuth_sine);
    CHECK(t.targets[i].amplitude == s.targets[i].amplitude);
  }
  const TargetScene bins = io::scene_from_json(R"({"targets": [{"delay_bin": 25, "doppler_bin": 3}]})", p);
  CHECK(bins.targets[0].delay_s == Approx(0.25));
  CHECK(bins.targets[0].doppler_rad_s == Approx(3.0 * p.doppler_step_rad_s()));
  CHECK(bins.targets[0].amplitude == Complex(1.0, 0.0));
}

TEST_CASE("array_to_json - round trip") {
  ArrayGeometry a = make_array(8, 10, 3, 4, ArrayMode::random, 5);
  a.carriers_hz = fdma_carriers(3, 0.0, 1e6, 1e6);
  const ArrayGeometry b = io::array_from_json(io::array_to_json(a));
  CHECK(b.tx_positions == a.tx_positions);
  CHECK(b.rx_positions == a.rx_positions);
  CHECK(b.carriers_hz == a.carriers_hz);
  CHECK(b.virtual_tx == 8);
  const MimoScene ms{{MimoTarget{1e-6, 0.3, 120.0, {0.5, 0.5}}}};
  const MimoScene back = io::mimo_scene_from_json(io::mimo_scene_to_json(ms));
  REQUIRE(back.targets.size() == 1);
  CHECK(back.targets[0].doppler_hz == 120.0);
  CHECK(back.targets[0].amplitude == ms.targets[0].amplitude);
}

TEST_CASE("write_xamples - bit-exact round trip") {
  Rng rng(3);
  const RadarParams p = RadarParams::make(1e-4, 4e5, 1e10, 12);
  const TargetScene s{{Target{3.3e-5, 1234.5, 0.0, {0.7, 0.2}}}};
  std::vector<XampleSet> sets;
  sets.push_back(fourier_coeffs(s, p, flat_spectrum(40), PulseSchedule::uniform(12), BandSelection::random(40, 9, rng)));
  sets.push_back(fourier_coeffs(s, p, flat_spectrum(40), PulseSchedule::random_nonuniform(12, 5, rng),
                                BandSelection::multiband(40, 12, 3, rng)));
  sets.push_back(fourier_coeffs(s, p, flat_spectrum(40), PulseSchedule::random_phase_coded(12, 2, rng),
                                BandSelection::consecutive(40, 8, 4)));
  const ArrayGeometry array = make_array(4, 4, 2, 2, ArrayMode::random, 9);
  sets.push_back(mimo_fourier_coeffs({{MimoTarget{2e-5, 0.2, 100.0, {1.0, 0.0}}}}, p, array,
                                     {flat_spectrum(40), flat_spectrum(40)},
                                     {BandSelection::random(40, 4, rng), BandSelection::random(40, 4, rng)}));
  for (const auto& x : sets) {
    std::stringstream buf;
    io::write_xamples(buf, x);
    const XampleSet y = io::read_xamples(buf);
    CHECK(y.schedule.mode == x.schedule.mode);
    CHECK(y.schedule.slots == x.schedule.slots);
    CHECK(y.schedule.phases == x.schedule.phases);
    CHECK(y.kappa.kappa == x.kappa.kappa);
    CHECK(y.tx_kappa.size() == x.tx_kappa.size());
    CHECK(y.num_rx == x.num_rx);
    REQUIRE(y.num_channels() == x.num_channels());
    for (int ch = 0; ch < x.num_channels(); ++ch) CHECK(y.channels[ch] == x.channels[ch]);
  }
}

TEST_CASE("read_xamples - malformed input") {
  std::stringstream empty;
  CHECK_THROWS_AS(io::read_xamples(empty), io::FormatError);
  std::stringstream header_only("{\"nope\": 1}\n");
  CHECK_THROWS_AS(io::read_xamples(header_only), io::FormatError);
}

TEST_CASE("save_xamples - file round trip") {
  const RadarParams p = RadarParams::make(1.0, 16, 1e9, 4);
  const auto x = fourier_coeffs({{Target{0.5, 0.1, 0.0, {1.0, 0.0}}}}, p, flat_spectrum(16), PulseSchedule::uniform(4),
                                BandSelection::full(16));
  const auto path = (std::filesystem::temp_directory_path() / "xradar_io_test.csv").string();
  io::save_xamples(path, x);
  CHECK(io::load_xamples(path).channels[0] == x.channels[0]);
  std::filesystem::remove(path);
  CHECK_THROWS(io::load_xamples(path));
}

TEST_CASE("write_detections_csv - columns") {
  RecoveryResult r;
  Detection d;
  d.delay_bin = 3;
  d.doppler_bin = 4;
  d.amplitude = {1.0, -2.0};
  r.detections.push_back(d);
  std::stringstream out;
  io::write_detections_csv(out, r);
  std::string header;
  std::getline(out, header);
  CHECK(header == "delay_bin,doppler_bin,azimuth_bin,q,re_amp,im_amp,magnitude");
  std::string row;
  std::getline(out, row);
  CHECK(row.rfind("3,4,0,0,1,-2,", 0) == 0);

  const RadarParams p = RadarParams::make(1.0, 16, 1e9, 8);
  std::stringstream phys;
  io::write_detections_csv(phys, r, &p);
  std::getline(phys, header);
  CHECK(header.find("delay_s") != std::string::npos);
  CHECK(io::detections_to_json(r).find("\"delay_bin\"") != std::string::npos);
}

TEST_CASE("write_map_csv - header row and first column") {
  DelayDopplerMap m;
  m.values = CMatrix::Zero(2, 3);
  m.values(1, 2) = 5.0;
  m.magnitudes = m.values.cwiseAbs();
  std::stringstream out;
  io::write_map_csv(out, m);
  std::string line;
  std::getline(out, line);
  CHECK(line.find("0,1") != std::string::npos);
  int rows = 0;
  while (std::getline(out, line)) ++rows;
  CHECK(rows == 3);
}
