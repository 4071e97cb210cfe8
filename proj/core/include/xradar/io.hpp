#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "xradar/classic.hpp"
#include "xradar/geometry.hpp"
#include "xradar/model.hpp"
#include "xradar/recovery.hpp"
#include "xradar/synth.hpp"

namespace xradar::io {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// JSON text for the model types. Scenes use
// {"targets": [{"delay_s", "doppler_rad_s", "azimuth_sine", "amplitude": [re, im]}]};
// a target may instead give "delay_bin"/"doppler_bin" indices, resolved
// against params on read.
std::string params_to_json(const RadarParams& params);
RadarParams params_from_json(const std::string& text);
std::string scene_to_json(const TargetScene& scene);
TargetScene scene_from_json(const std::string& text, const RadarParams& params);
std::string array_to_json(const ArrayGeometry& array);
ArrayGeometry array_from_json(const std::string& text);
std::string mimo_scene_to_json(const MimoScene& scene);
MimoScene mimo_scene_from_json(const std::string& text);

/// XampleSet file: line 1 is a compact JSON header (params, schedule,
/// selections, channel count), line 2 the CSV header
/// "channel,frame,re_0,im_0,...", then one row per (channel, frame) with
/// values printed at full double precision.
void write_xamples(std::ostream& out, const XampleSet& x);
XampleSet read_xamples(std::istream& in);
void save_xamples(const std::string& path, const XampleSet& x);
XampleSet load_xamples(const std::string& path);

/// Detections: delay_bin,doppler_bin,azimuth_bin,q,re_amp,im_amp,magnitude
/// (plus delay_s,doppler_rad_s,azimuth_sine when params are given).
void write_detections_csv(std::ostream& out, const RecoveryResult& result, const RadarParams* params = nullptr,
                          int azimuth_bins = 1);
std::string detections_to_json(const RecoveryResult& result);

/// Magnitude map: header row of Doppler bins, first column of delay bins.
void write_map_csv(std::ostream& out, const DelayDopplerMap& map);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace xradar::io
