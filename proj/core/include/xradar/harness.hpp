#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "xradar/focusing.hpp"
#include "xradar/mimo.hpp"
#include "xradar/model.hpp"
#include "xradar/recovery.hpp"
#include "xradar/synth.hpp"

namespace xradar::harness {

enum class Mode { classic, focused, nonuniform, phase_coded, sfr, mimo };

std::string to_string(Mode mode);
Mode mode_from_string(const std::string& name);

struct SceneGenerator {
  int num_targets = 1;
  double amplitude_min = 1.0;
  double amplitude_max = 1.0;
  /// Off-grid scenes add a uniform +-0.5 bin offset in delay and Doppler.
  bool on_grid = true;
};

struct Compression {
  /// K; 0 keeps all N coefficients.
  int num_coeffs = 0;
  BandStrategy strategy = BandStrategy::random;
  int groups = 4;
  int start = 0;
  /// M for non-uniform trains; 0 sends every pulse.
  int num_pulses_sent = 0;
  /// Q for phase-coded trains.
  int ambiguity_factor = 1;
};

struct MimoSetup {
  int virtual_tx = 1;
  int virtual_rx = 1;
  int num_tx = 1;
  int num_rx = 1;
  ArrayMode array = ArrayMode::random;
  double carrier_spacing_hz = 0.0;
  bool exact_beta = true;
};

struct SfrSetup {
  double f0_hz = 0.0;
  double delta_f_hz = 1.0;
};

struct ExperimentConfig {
  std::string name = "experiment";
  Mode mode = Mode::focused;
  RadarParams params;
  std::optional<TargetScene> scene;
  SceneGenerator generator;
  Compression compression;
  MimoSetup mimo;
  SfrSetup sfr;
  FocusOptions recovery;
  std::vector<double> snr_sweep_db;
  int trials = 1;
  std::uint64_t seed = 0;
  std::string output_dir;
  int threads = 1;

  static ExperimentConfig from_json(const std::string& text);
  std::string to_json() const;
  void validate() const;
};

/// Hit ellipse semi-axes in bins; a detection (ds, dr) off a true target is a
/// hit when (ds/a)^2 + (dr/b)^2 (+ (du/c)^2 for MIMO) <= 1.
struct HitCriterion {
  double delay_bins = 3.0;
  double doppler_bins = 3.0;
  double azimuth_bins = 3.0;
};

struct Score {
  int hits = 0;
  int misses = 0;
  int false_alarms = 0;
};

/// Greedy one-to-one matching, closest (normalized distance) pair first.
/// Delay uses the unfolded bin delay_bin + q N; Doppler and azimuth distances
/// wrap around their grids.
Score scoreboard(const std::vector<QuantizedTarget>& truth, const RecoveryResult& result, const GridSpec& grid,
                 const HitCriterion& criterion = {});
Score scoreboard(const TargetScene& truth, const RecoveryResult& result, const GridSpec& grid,
                 const RadarParams& params, const HitCriterion& criterion = {});

struct SnrPoint {
  double snr_db = 0.0;
  int trials = 0;
  int targets = 0;
  int hits = 0;
  int detections = 0;
  int false_alarms = 0;

  double hit_rate() const { return targets > 0 ? static_cast<double>(hits) / targets : 0.0; }
  double false_alarm_rate() const { return detections > 0 ? static_cast<double>(false_alarms) / detections : 0.0; }
  /// sqrt(p (1 - p) / trials).
  double std_error() const;
};

struct TrialDetections {
  int trial = 0;
  double snr_db = 0.0;
  RecoveryResult result;
};

struct HitRateReport {
  std::string name;
  std::vector<SnrPoint> points;
  std::vector<TrialDetections> detections;
};

/// One trial at every SNR of the sweep. Scene, selection, schedule and array
/// come from the stream (seed, trial); noise from (seed, trial, snr index).
std::vector<TrialDetections> run_trial(const ExperimentConfig& config, int trial, std::vector<SnrPoint>& points);

/// Monte-Carlo hit-rate experiment on config.threads workers. Results do not
/// depend on the thread count. Writes report.csv and detections.csv into
/// output_dir when it is set.
HitRateReport run_experiment(const ExperimentConfig& config);

void write_report_csv(std::ostream& out, const HitRateReport& report);
void write_trial_detections_csv(std::ostream& out, const HitRateReport& report);

}  // namespace xradar::harness
