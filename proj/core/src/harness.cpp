#include "xradar/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>
#include <thread>
#include <tuple>

#include <nlohmann/json.hpp>

#include "xradar/classic.hpp"
#include "xradar/io.hpp"
#include "xradar/rng.hpp"

namespace xradar::harness {

using nlohmann::json;

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::classic: return "classic";
    case Mode::focused: return "focused";
    case Mode::nonuniform: return "nonuniform";
    case Mode::phase_coded: return "phase_coded";
    case Mode::sfr: return "sfr";
    case Mode::mimo: return "mimo";
  }
  return "focused";
}

Mode mode_from_string(const std::string& name) {
  for (Mode m : {Mode::classic, Mode::focused, Mode::nonuniform, Mode::phase_coded, Mode::sfr, Mode::mimo})
    if (to_string(m) == name) return m;
  throw std::invalid_argument("unknown mode '" + name + "'");
}

namespace {

double snr_from_json(const json& j) {
  if (j.is_null()) return std::numeric_limits<double>::infinity();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    throw std::invalid_argument("snr_sweep_db: unknown value '" + s + "'");
  }
  return j.get<double>();
}

json snr_to_json(double v) {
  if (std::isinf(v) && v > 0.0) return "inf";
  return v;
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string backend_name(FocusBackend b) { return b == FocusBackend::matrix_omp ? "matrix_omp" : "matching_pursuit"; }

FocusBackend backend_from(const std::string& s) {
  if (s == "matching_pursuit") return FocusBackend::matching_pursuit;
  if (s == "matrix_omp") return FocusBackend::matrix_omp;
  throw std::invalid_argument("unknown recovery backend '" + s + "'");
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  try {
    ExperimentConfig c;
    c.name = j.value("name", c.name);
    c.mode = mode_from_string(j.at("mode").get<std::string>());
    c.params = io::params_from_json(j.at("params").dump());
    if (j.contains("scene")) c.scene = io::scene_from_json(j.at("scene").dump(), c.params);
    if (j.contains("scene_generator")) {
      const json& g = j.at("scene_generator");
      c.generator.num_targets = g.value("num_targets", c.generator.num_targets);
      c.generator.amplitude_min = g.value("amplitude_min", c.generator.amplitude_min);
      c.generator.amplitude_max = g.value("amplitude_max", c.generator.amplitude_max);
      c.generator.on_grid = g.value("on_grid", c.generator.on_grid);
    }
    if (j.contains("compression")) {
      const json& k = j.at("compression");
      c.compression.num_coeffs = k.value("num_coeffs", 0);
      c.compression.strategy = band_strategy_from_string(k.value("strategy", std::string("random")));
      c.compression.groups = k.value("groups", 4);
      c.compression.start = k.value("start", 0);
      c.compression.num_pulses_sent = k.value("num_pulses_sent", 0);
      c.compression.ambiguity_factor = k.value("ambiguity_factor", 1);
    }
    if (j.contains("mimo")) {
      const json& m = j.at("mimo");
      c.mimo.virtual_tx = m.value("virtual_tx", 1);
      c.mimo.virtual_rx = m.value("virtual_rx", 1);
      c.mimo.num_tx = m.value("num_tx", 1);
      c.mimo.num_rx = m.value("num_rx", 1);
      c.mimo.array = m.value("array", std::string("random")) == "ula" ? ArrayMode::ula : ArrayMode::random;
      c.mimo.carrier_spacing_hz = m.value("carrier_spacing_hz", 0.0);
      c.mimo.exact_beta = m.value("exact_beta", true);
    }
    if (j.contains("sfr")) {
      c.sfr.f0_hz = j.at("sfr").value("f0_hz", 0.0);
      c.sfr.delta_f_hz = j.at("sfr").value("delta_f_hz", 1.0);
    }
    if (j.contains("recovery")) {
      const json& r = j.at("recovery");
      c.recovery.backend = backend_from(r.value("backend", std::string("matching_pursuit")));
      c.recovery.refit = r.value("refit", true);
      c.recovery.polish = r.value("polish", true);
      c.recovery.refine = r.value("refine", false);
      c.recovery.exact_search = r.value("exact_search", false);
      c.recovery.search_budget = r.value("search_budget", c.recovery.search_budget);
    }
    c.snr_sweep_db.clear();
    if (j.contains("snr_sweep_db"))
      for (const json& v : j.at("snr_sweep_db")) c.snr_sweep_db.push_back(snr_from_json(v));
    else
      c.snr_sweep_db.push_back(std::numeric_limits<double>::infinity());
    c.trials = j.value("trials", 1);
    c.seed = j.value("seed", std::uint64_t{0});
    c.output_dir = j.value("output_dir", std::string());
    c.threads = j.value("threads", 1);
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
}

std::string ExperimentConfig::to_json() const {
  json j;
  j["name"] = name;
  j["mode"] = to_string(mode);
  j["params"] = json::parse(io::params_to_json(params));
  if (scene) j["scene"] = json::parse(io::scene_to_json(*scene));
  j["scene_generator"] = {{"num_targets", generator.num_targets},
                          {"amplitude_min", generator.amplitude_min},
                          {"amplitude_max", generator.amplitude_max},
                          {"on_grid", generator.on_grid}};
  j["compression"] = {{"num_coeffs", compression.num_coeffs},
                      {"strategy", xradar::to_string(compression.strategy)},
                      {"groups", compression.groups},
                      {"start", compression.start},
                      {"num_pulses_sent", compression.num_pulses_sent},
                      {"ambiguity_factor", compression.ambiguity_factor}};
  j["mimo"] = {{"virtual_tx", mimo.virtual_tx},
               {"virtual_rx", mimo.virtual_rx},
               {"num_tx", mimo.num_tx},
               {"num_rx", mimo.num_rx},
               {"array", mimo.array == ArrayMode::ula ? "ula" : "random"},
               {"carrier_spacing_hz", mimo.carrier_spacing_hz},
               {"exact_beta", mimo.exact_beta}};
  j["sfr"] = {{"f0_hz", sfr.f0_hz}, {"delta_f_hz", sfr.delta_f_hz}};
  j["recovery"] = {{"backend", backend_name(recovery.backend)},
                   {"refit", recovery.refit},
                   {"polish", recovery.polish},
                   {"refine", recovery.refine},
                   {"exact_search", recovery.exact_search},
                   {"search_budget", recovery.search_budget}};
  json sweep = json::array();
  for (double v : snr_sweep_db) sweep.push_back(snr_to_json(v));
  j["snr_sweep_db"] = sweep;
  j["trials"] = trials;
  j["seed"] = seed;
  j["output_dir"] = output_dir;
  j["threads"] = threads;
  return j.dump(2);
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (threads < 1) throw std::invalid_argument("config: threads must be >= 1");
  if (snr_sweep_db.empty()) throw std::invalid_argument("config: empty SNR sweep");
  if (!scene && generator.num_targets < 1) throw std::invalid_argument("config: scene_generator.num_targets must be >= 1");
  if (generator.amplitude_min <= 0.0 || generator.amplitude_max < generator.amplitude_min)
    throw std::invalid_argument("config: need 0 < amplitude_min <= amplitude_max");
  const int n = params.num_nyquist_bins;
  if (compression.num_coeffs < 0 || compression.num_coeffs > n)
    throw std::invalid_argument("config: compression.num_coeffs must lie in [0, N]");
  if (mode == Mode::nonuniform &&
      (compression.num_pulses_sent < 1 || compression.num_pulses_sent > params.num_pulses))
    throw std::invalid_argument("config: nonuniform mode needs 1 <= num_pulses_sent <= num_pulses");
  if (mode == Mode::phase_coded &&
      (compression.ambiguity_factor < 1 || compression.ambiguity_factor >= params.num_pulses))
    throw std::invalid_argument("config: phase_coded mode needs 1 <= ambiguity_factor < num_pulses");
  if (mode == Mode::mimo) {
    if (mimo.num_tx < 1 || mimo.num_tx > mimo.virtual_tx || mimo.num_rx < 1 || mimo.num_rx > mimo.virtual_rx)
      throw std::invalid_argument("config: mimo needs 1 <= num_tx <= virtual_tx and 1 <= num_rx <= virtual_rx");
    if (scene) throw std::invalid_argument("config: mimo mode draws its scenes from scene_generator");
  }
  if (mode == Mode::sfr && !(sfr.delta_f_hz > 0.0)) throw std::invalid_argument("config: sfr.delta_f_hz must be positive");
}

double SnrPoint::std_error() const {
  if (trials < 1) return 0.0;
  const double p = hit_rate();
  return std::sqrt(p * (1.0 - p) / trials);
}

Score scoreboard(const std::vector<QuantizedTarget>& truth, const RecoveryResult& result, const GridSpec& grid,
                 const HitCriterion& criterion) {
  struct Pair {
    double dist;
    std::size_t t;
    std::size_t d;
  };
  const auto wrap = [](int diff, int size) {
    if (size <= 0) return std::abs(diff);
    const int m = ((diff % size) + size) % size;
    return std::min(m, size - m);
  };
  std::vector<Pair> pairs;
  for (std::size_t t = 0; t < truth.size(); ++t) {
    for (std::size_t d = 0; d < result.detections.size(); ++d) {
      const Detection& det = result.detections[d];
      const QuantizedTarget& q = truth[t];
      const double ds = (det.delay_bin + det.ambiguity_order * grid.delay_bins + det.delay_offset) -
                        (q.delay_bin + q.ambiguity_order * grid.delay_bins);
      const double dr = wrap(det.doppler_bin - q.doppler_bin, grid.doppler_bins) + 0.0;
      double dist = (ds / criterion.delay_bins) * (ds / criterion.delay_bins) +
                    (dr / criterion.doppler_bins) * (dr / criterion.doppler_bins);
      if (grid.azimuth_bins > 1) {
        const double du = wrap(det.azimuth_bin - q.azimuth_bin, grid.azimuth_bins);
        dist += (du / criterion.azimuth_bins) * (du / criterion.azimuth_bins);
      }
      if (dist <= 1.0) pairs.push_back({dist, t, d});
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    return std::tie(a.dist, a.t, a.d) < std::tie(b.dist, b.t, b.d);
  });
  std::vector<bool> t_used(truth.size(), false), d_used(result.detections.size(), false);
  Score s;
  for (const Pair& p : pairs) {
    if (t_used[p.t] || d_used[p.d]) continue;
    t_used[p.t] = d_used[p.d] = true;
    ++s.hits;
  }
  s.misses = static_cast<int>(truth.size()) - s.hits;
  s.false_alarms = static_cast<int>(result.detections.size()) - s.hits;
  return s;
}

Score scoreboard(const TargetScene& truth, const RecoveryResult& result, const GridSpec& grid,
                 const RadarParams& params, const HitCriterion& criterion) {
  return scoreboard(quantize_scene(truth, grid, params), result, grid, criterion);
}

namespace {

constexpr std::uint64_t kNoiseStream = 0x6e6f697365ULL;

struct TrialSetup {
  std::vector<QuantizedTarget> truth;
  GridSpec grid;
};

// Distinct random cells on the (delay x Q, Doppler, azimuth) grid.
std::vector<QuantizedTarget> draw_cells(Rng& rng, const SceneGenerator& g, int delay_cells, int doppler_bins,
                                        int azimuth_bins, int delay_bins) {
  const long long total = static_cast<long long>(delay_cells) * doppler_bins * azimuth_bins;
  if (g.num_targets > total) throw std::invalid_argument("scene_generator: more targets than grid cells");
  std::set<std::tuple<int, int, int>> used;
  std::vector<QuantizedTarget> cells;
  while (static_cast<int>(cells.size()) < g.num_targets) {
    const int s = static_cast<int>(rng.below(static_cast<std::uint64_t>(delay_cells)));
    const int r = static_cast<int>(rng.below(static_cast<std::uint64_t>(doppler_bins)));
    const int u = static_cast<int>(rng.below(static_cast<std::uint64_t>(azimuth_bins)));
    if (!used.emplace(s, r, u).second) continue;
    QuantizedTarget q;
    q.delay_bin = s % delay_bins;
    q.ambiguity_order = s / delay_bins;
    q.doppler_bin = r;
    q.azimuth_bin = u;
    const double mag = rng.uniform(g.amplitude_min, g.amplitude_max);
    q.amplitude = mag * unit_phasor(rng.uniform());
    cells.push_back(q);
  }
  return cells;
}

TargetScene cells_to_scene(const std::vector<QuantizedTarget>& cells, const GridSpec& grid, const RadarParams& params,
                           Rng& rng, bool on_grid) {
  TargetScene scene;
  for (const QuantizedTarget& q : cells) {
    Target t = dequantize(q, grid, params);
    if (!on_grid) {
      t.delay_s += rng.uniform(-0.5, 0.5) * grid.delay_step_s(params);
      t.doppler_rad_s += rng.uniform(-0.5, 0.5) * grid.doppler_step_rad_s(params);
      const double span = grid.ambiguity_factor * params.pri_s;
      t.delay_s = std::fmod(std::fmod(t.delay_s, span) + span, span);
    }
    scene.targets.push_back(t);
  }
  return scene;
}

BandSelection draw_selection(const Compression& c, int n, Rng& rng) {
  const int k = c.num_coeffs == 0 ? n : c.num_coeffs;
  if (k == n) return BandSelection::full(n);
  switch (c.strategy) {
    case BandStrategy::random: return BandSelection::random(n, k, rng);
    case BandStrategy::consecutive: return BandSelection::consecutive(n, k, c.start);
    case BandStrategy::multiband: return BandSelection::multiband(n, k, std::min(c.groups, k), rng);
    case BandStrategy::full: return BandSelection::full(n);
    case BandStrategy::custom: break;
  }
  throw std::invalid_argument("config: custom selections are not drawn per trial");
}

void tally(std::vector<SnrPoint>& points, std::size_t i, const Score& s, int targets, int detections) {
  SnrPoint& p = points[i];
  p.trials += 1;
  p.targets += targets;
  p.hits += s.hits;
  p.false_alarms += s.false_alarms;
  p.detections += detections;
}

}  // namespace

std::vector<TrialDetections> run_trial(const ExperimentConfig& config, int trial, std::vector<SnrPoint>& points) {
  const RadarParams& params = config.params;
  const int n = params.num_nyquist_bins;
  const int p = params.num_pulses;
  Rng rng(Rng::derive(config.seed, {static_cast<std::uint64_t>(trial)}));
  if (points.size() != config.snr_sweep_db.size()) {
    points.assign(config.snr_sweep_db.size(), SnrPoint{});
    for (std::size_t i = 0; i < points.size(); ++i) points[i].snr_db = config.snr_sweep_db[i];
  }
  std::vector<TrialDetections> out;
  const auto noise_seed = [&](std::size_t i) {
    return Rng::derive(config.seed, {static_cast<std::uint64_t>(trial), static_cast<std::uint64_t>(i), kNoiseStream});
  };
  const PulseSpectrum spectrum = flat_spectrum(n);
  const int num_targets = config.scene ? static_cast<int>(config.scene->targets.size()) : config.generator.num_targets;

  if (config.mode == Mode::sfr) {
    const SfrGrid sgrid{config.sfr.f0_hz, config.sfr.delta_f_hz, params.pri_s, p, 1};
    GridSpec grid{p, 1, 1, 1};
    std::vector<QuantizedTarget> truth;
    TargetScene scene;
    if (config.scene) {
      scene = *config.scene;
      for (const Target& t : scene.targets) {
        QuantizedTarget q;
        q.delay_bin = quantize_index(t.delay_s / sgrid.delay_step_s(), p);
        truth.push_back(q);
      }
    } else {
      truth = draw_cells(rng, config.generator, p, 1, 1, p);
      for (const QuantizedTarget& q : truth) {
        Target t;
        t.delay_s = q.delay_bin * sgrid.delay_step_s();
        if (!config.generator.on_grid) t.delay_s += rng.uniform(-0.5, 0.5) * sgrid.delay_step_s();
        t.amplitude = q.amplitude;
        scene.targets.push_back(t);
      }
    }
    const CVector y = sfr_phase_detector(scene, sgrid.f0_hz, sgrid.delta_f_hz, p, params.pri_s);
    for (std::size_t i = 0; i < config.snr_sweep_db.size(); ++i) {
      XampleSet wrap;
      wrap.channels.push_back(y);
      const XampleSet noisy = add_noise(wrap, config.snr_sweep_db[i], noise_seed(i));
      const RecoveryResult r = sfr_dft_recover(noisy.channels.front().col(0), sgrid, num_targets);
      tally(points, i, scoreboard(truth, r, grid), static_cast<int>(truth.size()),
            static_cast<int>(r.detections.size()));
      out.push_back({trial, config.snr_sweep_db[i], r});
    }
    return out;
  }

  if (config.mode == Mode::mimo) {
    const MimoSetup& m = config.mimo;
    const int azimuth_bins = m.virtual_tx * m.virtual_rx;
    ArrayGeometry array =
        make_array(m.virtual_tx, m.virtual_rx, m.num_tx, m.num_rx, m.array, rng.next_u64());
    if (m.carrier_spacing_hz > 0.0)
      array.carriers_hz = fdma_carriers(m.num_tx, 0.0, m.carrier_spacing_hz, params.bandwidth_hz);
    std::vector<BandSelection> tx_kappa;
    for (int t = 0; t < m.num_tx; ++t) tx_kappa.push_back(draw_selection(config.compression, n, rng));
    const GridSpec grid{n, p, azimuth_bins, 1};
    const std::vector<QuantizedTarget> truth = draw_cells(rng, config.generator, n, p, azimuth_bins, n);
    MimoScene scene;
    for (const QuantizedTarget& q : truth)
      scene.targets.push_back(
          {q.delay_bin * params.delay_step_s(), grid.azimuth_sine(q.azimuth_bin), mimo_doppler_hz(q.doppler_bin, params),
           q.amplitude});
    const std::vector<PulseSpectrum> spectra(static_cast<std::size_t>(m.num_tx), spectrum);
    const XampleSet clean = mimo_fourier_coeffs(scene, params, array, spectra, tx_kappa, m.exact_beta);
    MimoOptions mo;
    mo.exact_beta = m.exact_beta;
    mo.refit = config.recovery.refit;
    mo.polish = config.recovery.polish;
    mo.exact_search = config.recovery.exact_search;
    mo.search_budget = config.recovery.search_budget;
    for (std::size_t i = 0; i < config.snr_sweep_db.size(); ++i) {
      const XampleSet noisy = add_noise(clean, config.snr_sweep_db[i], noise_seed(i));
      const RecoveryResult r = recover_mimo(noisy, array, spectra, num_targets, mo);
      tally(points, i, scoreboard(truth, r, grid), static_cast<int>(truth.size()),
            static_cast<int>(r.detections.size()));
      out.push_back({trial, config.snr_sweep_db[i], r});
    }
    return out;
  }

  const int q_factor = config.mode == Mode::phase_coded ? config.compression.ambiguity_factor : 1;
  const GridSpec grid{n, p, 1, q_factor};
  std::vector<QuantizedTarget> truth;
  TargetScene scene;
  if (config.scene) {
    scene = *config.scene;
    truth = quantize_scene(scene, grid, params);
  } else {
    truth = draw_cells(rng, config.generator, n * q_factor, p, 1, n);
    scene = cells_to_scene(truth, grid, params, rng, config.generator.on_grid);
  }
  // Drawn after the scene so that runs differing only in schedule or
  // selection strategy see the same scenes.
  PulseSchedule schedule = PulseSchedule::uniform(p);
  if (config.mode == Mode::nonuniform)
    schedule = PulseSchedule::random_nonuniform(p, config.compression.num_pulses_sent, rng);
  if (config.mode == Mode::phase_coded) schedule = PulseSchedule::random_phase_coded(p, q_factor, rng);
  const BandSelection kappa = draw_selection(config.compression, n, rng);
  const XampleSet clean = fourier_coeffs(scene, params, spectrum, schedule, kappa);
  for (std::size_t i = 0; i < config.snr_sweep_db.size(); ++i) {
    const XampleSet noisy = add_noise(clean, config.snr_sweep_db[i], noise_seed(i));
    RecoveryResult r;
    switch (config.mode) {
      case Mode::classic: r = classic_from_xamples(noisy, spectrum, num_targets); break;
      case Mode::phase_coded: r = recover_phase_coded(noisy, spectrum, num_targets, config.recovery); break;
      default: r = recover_focused(noisy, spectrum, num_targets, config.recovery); break;
    }
    tally(points, i, scoreboard(truth, r, grid), static_cast<int>(truth.size()), static_cast<int>(r.detections.size()));
    out.push_back({trial, config.snr_sweep_db[i], r});
  }
  return out;
}

HitRateReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  const int trials = config.trials;
  std::vector<std::vector<SnrPoint>> per_trial(static_cast<std::size_t>(trials));
  std::vector<std::vector<TrialDetections>> per_trial_dets(static_cast<std::size_t>(trials));
  std::vector<std::string> errors(static_cast<std::size_t>(trials));

  std::atomic<int> next{0};
  const auto worker = [&]() {
    for (int t = next++; t < trials; t = next++) {
      try {
        per_trial_dets[static_cast<std::size_t>(t)] = run_trial(config, t, per_trial[static_cast<std::size_t>(t)]);
      } catch (const std::exception& e) {
        errors[static_cast<std::size_t>(t)] = e.what();
      }
    }
  };
  const int workers = std::max(1, std::min(config.threads, trials));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (int t = 0; t < trials; ++t)
    if (!errors[static_cast<std::size_t>(t)].empty())
      throw std::runtime_error("trial " + std::to_string(t) + ": " + errors[static_cast<std::size_t>(t)]);

  HitRateReport report;
  report.name = config.name;
  report.points.assign(config.snr_sweep_db.size(), SnrPoint{});
  for (std::size_t i = 0; i < report.points.size(); ++i) report.points[i].snr_db = config.snr_sweep_db[i];
  for (int t = 0; t < trials; ++t) {
    const auto& pts = per_trial[static_cast<std::size_t>(t)];
    for (std::size_t i = 0; i < pts.size(); ++i) {
      report.points[i].trials += pts[i].trials;
      report.points[i].targets += pts[i].targets;
      report.points[i].hits += pts[i].hits;
      report.points[i].detections += pts[i].detections;
      report.points[i].false_alarms += pts[i].false_alarms;
    }
    for (auto& d : per_trial_dets[static_cast<std::size_t>(t)]) report.detections.push_back(std::move(d));
  }

  if (!config.output_dir.empty()) {
    std::filesystem::create_directories(config.output_dir);
    const std::filesystem::path dir(config.output_dir);
    std::ofstream rep(dir / "report.csv");
    std::ofstream det(dir / "detections.csv");
    if (!rep || !det) throw std::runtime_error("cannot write results into '" + config.output_dir + "'");
    write_report_csv(rep, report);
    write_trial_detections_csv(det, report);
  }
  return report;
}

void write_report_csv(std::ostream& out, const HitRateReport& report) {
  out << "snr_db,hit_rate,fa_rate,trials,stderr\n";
  for (const SnrPoint& p : report.points)
    out << fmt(p.snr_db) << ',' << fmt(p.hit_rate()) << ',' << fmt(p.false_alarm_rate()) << ',' << p.trials << ','
        << fmt(p.std_error()) << '\n';
}

void write_trial_detections_csv(std::ostream& out, const HitRateReport& report) {
  out << "snr_db,trial,delay_bin,doppler_bin,azimuth_bin,q,re_amp,im_amp\n";
  for (const TrialDetections& t : report.detections)
    for (const Detection& d : t.result.detections)
      out << fmt(t.snr_db) << ',' << t.trial << ',' << d.delay_bin << ',' << d.doppler_bin << ',' << d.azimuth_bin << ','
          << d.ambiguity_order << ',' << fmt(d.amplitude.real()) << ',' << fmt(d.amplitude.imag()) << '\n';
}

}  // namespace xradar::harness
