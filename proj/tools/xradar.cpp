// xradar: simulate, recover and evaluate sub-Nyquist pulse-Doppler radar scenes.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "xradar/classic.hpp"
#include "xradar/focusing.hpp"
#include "xradar/harness.hpp"
#include "xradar/io.hpp"
#include "xradar/mimo.hpp"

using namespace xradar;
using nlohmann::json;

namespace {

struct Global {
  std::uint64_t seed = 0;
  int threads = 1;
  std::string format = "csv";
};

// Raised for bad option values found after parsing; exits with the usage code.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double parse_snr(const std::string& s) {
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw UsageError("--snr expects a number in dB or 'inf', got '" + s + "'");
}

// Writes to the named file, or stdout for "" and "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    io::write_text_file(path, text);
}

std::string detections_text(const Global& g, const RecoveryResult& r, const RadarParams& params, int azimuth_bins) {
  if (g.format == "json") return io::detections_to_json(r) + "\n";
  std::ostringstream out;
  io::write_detections_csv(out, r, &params, azimuth_bins);
  return out.str();
}

// simulate -------------------------------------------------------------------

struct SimulateArgs {
  std::string params;
  std::string scene;
  std::string mode = "uniform";
  int coeffs = 0;
  std::string strategy = "random";
  int groups = 4;
  int start = 0;
  int pulses_sent = 0;
  int ambiguity = 1;
  std::string snr = "inf";
  std::string output;
};

int run_simulate(const Global& g, const SimulateArgs& a) {
  const RadarParams params = io::params_from_json(io::read_text_file(a.params));
  const TargetScene scene = io::scene_from_json(io::read_text_file(a.scene), params);
  const int n = params.num_nyquist_bins;
  const int p = params.num_pulses;
  Rng rng(g.seed);

  PulseSchedule schedule = PulseSchedule::uniform(p);
  const ScheduleMode mode = schedule_mode_from_string(a.mode);
  if (mode == ScheduleMode::nonuniform) {
    if (a.pulses_sent < 1) throw UsageError("--pulses-sent is required for nonuniform trains");
    schedule = PulseSchedule::random_nonuniform(p, a.pulses_sent, rng);
  } else if (mode == ScheduleMode::phase_coded) {
    schedule = PulseSchedule::random_phase_coded(p, a.ambiguity, rng);
  }

  const int k = a.coeffs == 0 ? n : a.coeffs;
  BandSelection kappa = BandSelection::full(n);
  if (k != n) {
    switch (band_strategy_from_string(a.strategy)) {
      case BandStrategy::random: kappa = BandSelection::random(n, k, rng); break;
      case BandStrategy::consecutive: kappa = BandSelection::consecutive(n, k, a.start); break;
      case BandStrategy::multiband: kappa = BandSelection::multiband(n, k, a.groups, rng); break;
      default: throw UsageError("--strategy must be random, consecutive or multiband when --coeffs < N");
    }
  }
  const XampleSet clean = fourier_coeffs(scene, params, flat_spectrum(n), schedule, kappa);
  const XampleSet x = add_noise(clean, parse_snr(a.snr), Rng::derive(g.seed, {1}));
  std::ostringstream out;
  io::write_xamples(out, x);
  emit(a.output, out.str());
  return 0;
}

// recover --------------------------------------------------------------------

struct RecoverArgs {
  std::string input;
  int targets = 1;
  std::string backend = "matching_pursuit";
  bool exact_search = false;
  bool refine = false;
  bool classic = false;
  std::string output;
};

int run_recover(const Global& g, const RecoverArgs& a) {
  const XampleSet x = io::load_xamples(a.input);
  if (x.num_channels() != 1) throw std::runtime_error("recover: multichannel sample files need the mimo subcommand");
  const PulseSpectrum spectrum = flat_spectrum(x.params.num_nyquist_bins);
  FocusOptions opt;
  opt.backend = a.backend == "matrix_omp" ? FocusBackend::matrix_omp : FocusBackend::matching_pursuit;
  opt.exact_search = a.exact_search;
  opt.refine = a.refine;
  RecoveryResult r;
  if (a.classic)
    r = classic_from_xamples(x, spectrum, a.targets);
  else if (x.schedule.mode == ScheduleMode::phase_coded)
    r = recover_phase_coded(x, spectrum, a.targets, opt);
  else
    r = recover_focused(x, spectrum, a.targets, opt);
  emit(a.output, detections_text(g, r, x.params, 1));
  return 0;
}

// mc -------------------------------------------------------------------------

struct McArgs {
  std::string config;
  std::string output_dir;
  int trials = 0;
};

int run_mc(const Global& g, const McArgs& a, bool seed_given, bool threads_given) {
  harness::ExperimentConfig c = harness::ExperimentConfig::from_json(io::read_text_file(a.config));
  if (seed_given) c.seed = g.seed;
  if (threads_given) c.threads = g.threads;
  if (!a.output_dir.empty()) c.output_dir = a.output_dir;
  if (a.trials > 0) c.trials = a.trials;
  const harness::HitRateReport report = harness::run_experiment(c);
  if (g.format == "json") {
    json j;
    j["name"] = report.name;
    j["points"] = json::array();
    for (const auto& p : report.points)
      j["points"].push_back({{"snr_db", std::isinf(p.snr_db) ? json("inf") : json(p.snr_db)},
                             {"hit_rate", p.hit_rate()},
                             {"fa_rate", p.false_alarm_rate()},
                             {"trials", p.trials},
                             {"stderr", p.std_error()}});
    std::cout << j.dump(2) << '\n';
  } else {
    harness::write_report_csv(std::cout, report);
  }
  return 0;
}

// map ------------------------------------------------------------------------

struct MapArgs {
  std::string params;
  std::string scene;
  std::string snr = "inf";
  std::string output;
};

int run_map(const Global& g, const MapArgs& a) {
  const RadarParams params = io::params_from_json(io::read_text_file(a.params));
  const TargetScene scene = io::scene_from_json(io::read_text_file(a.scene), params);
  const PulseSpectrum h = flat_spectrum(params.num_nyquist_bins);
  XampleSet frames;
  frames.channels.push_back(nyquist_time_samples(scene, params, h, PulseSchedule::uniform(params.num_pulses)));
  const XampleSet noisy = add_noise(frames, parse_snr(a.snr), Rng::derive(g.seed, {1}));
  const DelayDopplerMap map = doppler_dft(matched_filter(noisy.channels[0], pulse_samples(h)), params.delay_step_s(),
                                          params.doppler_step_rad_s());
  if (g.format == "json") {
    // Rows follow the target Doppler convention, as in the CSV.
    json rows = json::array();
    for (int n = 0; n < map.delay_bins(); ++n) {
      json row = json::array();
      for (int r = 0; r < map.doppler_bins(); ++r) row.push_back(map.magnitudes(resign_doppler_bin(r, map.doppler_bins()), n));
      rows.push_back(row);
    }
    emit(a.output, json{{"delay_bins", map.delay_bins()}, {"doppler_bins", map.doppler_bins()}, {"magnitudes", rows}}
                           .dump() +
                       "\n");
  } else {
    std::ostringstream out;
    io::write_map_csv(out, map);
    emit(a.output, out.str());
  }
  return 0;
}

// mimo -----------------------------------------------------------------------

struct MimoArgs {
  std::string config;
  std::string output;
};

// Doppler is reported in Hz with the MIMO sign convention of the input scene.
std::string mimo_detections_text(const Global& g, const RecoveryResult& r, const RadarParams& params, int azimuth_bins) {
  if (g.format == "json") return io::detections_to_json(r) + "\n";
  std::ostringstream out;
  out.precision(17);
  out << "delay_bin,doppler_bin,azimuth_bin,re_amp,im_amp,magnitude,delay_s,doppler_hz,azimuth_sine\n";
  for (const Detection& d : r.detections) {
    double sine = 2.0 * d.azimuth_bin / azimuth_bins;
    if (sine >= 1.0) sine -= 2.0;
    out << d.delay_bin << ',' << d.doppler_bin << ',' << d.azimuth_bin << ',' << d.amplitude.real() << ','
        << d.amplitude.imag() << ',' << d.magnitude() << ',' << d.delay_bin * params.delay_step_s() << ','
        << mimo_doppler_hz(d.doppler_bin, params) << ',' << sine << '\n';
  }
  return out.str();
}

// {"params", "array" (geometry) or "array_spec" {virtual_tx, virtual_rx, num_tx,
//  num_rx, mode}, "scene" (MIMO scene), "num_coeffs", "num_targets", "snr_db",
//  "exact_search", "exact_beta"}
int run_mimo(const Global& g, const MimoArgs& a) {
  json j;
  try {
    j = json::parse(io::read_text_file(a.config));
  } catch (const json::exception& e) {
    throw io::FormatError(std::string("mimo config: ") + e.what());
  }
  try {
    const RadarParams params = io::params_from_json(j.at("params").dump());
    const int n = params.num_nyquist_bins;
    Rng rng(g.seed);
    ArrayGeometry array;
    if (j.contains("array")) {
      array = io::array_from_json(j.at("array").dump());
    } else {
      const json& s = j.at("array_spec");
      array = make_array(s.at("virtual_tx").get<int>(), s.at("virtual_rx").get<int>(), s.at("num_tx").get<int>(),
                         s.at("num_rx").get<int>(), s.value("mode", std::string("random")) == "ula" ? ArrayMode::ula
                                                                                                 : ArrayMode::random,
                         rng.next_u64());
    }
    const MimoScene scene = io::mimo_scene_from_json(j.at("scene").dump());
    const int k = j.value("num_coeffs", 0);
    std::vector<BandSelection> kappa;
    for (int m = 0; m < array.num_tx(); ++m)
      kappa.push_back(k == 0 || k == n ? BandSelection::full(n) : BandSelection::random(n, k, rng));
    const std::vector<PulseSpectrum> spectra(static_cast<std::size_t>(array.num_tx()), flat_spectrum(n));
    MimoOptions opt;
    opt.exact_beta = j.value("exact_beta", true);
    opt.exact_search = j.value("exact_search", false);
    const XampleSet clean = mimo_fourier_coeffs(scene, params, array, spectra, kappa, opt.exact_beta);
    double snr = std::numeric_limits<double>::infinity();
    if (j.contains("snr_db") && j.at("snr_db").is_number()) snr = j.at("snr_db").get<double>();
    const XampleSet x = add_noise(clean, snr, Rng::derive(g.seed, {1}));
    const int targets = j.value("num_targets", static_cast<int>(scene.targets.size()));
    const RecoveryResult r = recover_mimo(x, array, spectra, targets, opt);
    emit(a.output, mimo_detections_text(g, r, params, array.azimuth_bins()));
  } catch (const json::exception& e) {
    throw io::FormatError(std::string("mimo config: ") + e.what());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sub-Nyquist pulse-Doppler radar: simulation, recovery and Monte-Carlo evaluation"};
  app.require_subcommand(1);
  Global g;
  auto* seed_opt = app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  auto* threads_opt =
      app.add_option("--threads", g.threads, "Worker threads for mc")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Scene to sample file (Fourier coefficients per frame)");
  simulate->add_option("--params", sim.params, "Radar parameter JSON")->required()->check(CLI::ExistingFile);
  simulate->add_option("--scene", sim.scene, "Scene JSON")->required()->check(CLI::ExistingFile);
  simulate->add_option("--mode", sim.mode, "Pulse train")->check(CLI::IsMember({"uniform", "nonuniform", "phase_coded"}));
  simulate->add_option("--coeffs", sim.coeffs, "Fourier coefficients per frame (0 keeps all)")->check(CLI::NonNegativeNumber);
  simulate->add_option("--strategy", sim.strategy, "Coefficient selection")
      ->check(CLI::IsMember({"random", "consecutive", "multiband"}));
  simulate->add_option("--groups", sim.groups, "Bands for multiband selection")->check(CLI::PositiveNumber);
  simulate->add_option("--start", sim.start, "First index for consecutive selection")->check(CLI::NonNegativeNumber);
  simulate->add_option("--pulses-sent", sim.pulses_sent, "Pulses sent in a nonuniform train");
  simulate->add_option("--ambiguity", sim.ambiguity, "Ambiguity factor Q of a phase-coded train")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--snr", sim.snr, "Per-coefficient SNR in dB, or inf");
  simulate->add_option("-o,--output", sim.output, "Output file (default stdout)");

  RecoverArgs rec;
  auto* recover = app.add_subcommand("recover", "Sample file to detections");
  recover->add_option("-i,--input", rec.input, "Sample file from simulate")->required()->check(CLI::ExistingFile);
  recover->add_option("-L,--targets", rec.targets, "Number of targets to report")->required()->check(CLI::PositiveNumber);
  recover->add_option("--backend", rec.backend, "Sparse solver")->check(CLI::IsMember({"matching_pursuit", "matrix_omp"}));
  recover->add_flag("--exact-search", rec.exact_search, "Search for an exact sparse fit after the greedy stage");
  recover->add_flag("--refine", rec.refine, "Refine delay and Doppler off the grid");
  recover->add_flag("--classic", rec.classic, "Matched filter and Doppler DFT on zero-filled samples");
  recover->add_option("-o,--output", rec.output, "Output file (default stdout)");

  McArgs mc;
  auto* mc_cmd = app.add_subcommand("mc", "Monte-Carlo hit-rate experiment from a JSON config");
  mc_cmd->add_option("-c,--config", mc.config, "Experiment config JSON")->required()->check(CLI::ExistingFile);
  mc_cmd->add_option("--output-dir", mc.output_dir, "Directory for report.csv and detections.csv");
  mc_cmd->add_option("--trials", mc.trials, "Override the trial count")->check(CLI::PositiveNumber);

  MapArgs map;
  auto* map_cmd = app.add_subcommand("map", "Scene to classic delay-Doppler magnitude map");
  map_cmd->add_option("--params", map.params, "Radar parameter JSON")->required()->check(CLI::ExistingFile);
  map_cmd->add_option("--scene", map.scene, "Scene JSON")->required()->check(CLI::ExistingFile);
  map_cmd->add_option("--snr", map.snr, "Per-sample SNR in dB, or inf");
  map_cmd->add_option("-o,--output", map.output, "Output file (default stdout)");

  MimoArgs mimo;
  auto* mimo_cmd = app.add_subcommand("mimo", "MIMO config to range-azimuth-Doppler detections");
  mimo_cmd->add_option("-c,--config", mimo.config, "MIMO config JSON")->required()->check(CLI::ExistingFile);
  mimo_cmd->add_option("-o,--output", mimo.output, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 1;
  }

  try {
    if (*simulate) return run_simulate(g, sim);
    if (*recover) return run_recover(g, rec);
    if (*mc_cmd) return run_mc(g, mc, seed_opt->count() > 0, threads_opt->count() > 0);
    if (*map_cmd) return run_map(g, map);
    if (*mimo_cmd) return run_mimo(g, mimo);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
