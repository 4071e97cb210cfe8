#include "xradar/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace xradar::io {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json complex_to_json(Complex c) { return json::array({c.real(), c.imag()}); }

Complex complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  throw FormatError("amplitude must be a number or [re, im]");
}

json params_json(const RadarParams& p) {
  json j{{"pri_s", p.pri_s}, {"bandwidth_hz", p.bandwidth_hz}, {"carrier_hz", p.carrier_hz}, {"num_pulses", p.num_pulses}};
  if (p.aperture) j["aperture"] = *p.aperture;
  return j;
}

RadarParams params_from(const json& j) {
  std::optional<double> aperture;
  if (j.contains("aperture")) aperture = j.at("aperture").get<double>();
  return RadarParams::make(j.at("pri_s").get<double>(), j.at("bandwidth_hz").get<double>(),
                           j.value("carrier_hz", 0.0), j.at("num_pulses").get<int>(), aperture);
}

json selection_json(const BandSelection& b) {
  return {{"num_bins", b.num_bins}, {"strategy", to_string(b.strategy)}, {"groups", b.groups}, {"kappa", b.kappa}};
}

BandSelection selection_from(const json& j) {
  BandSelection b;
  b.num_bins = j.at("num_bins").get<int>();
  b.strategy = band_strategy_from_string(j.value("strategy", "custom"));
  b.groups = j.value("groups", 0);
  b.kappa = j.at("kappa").get<std::vector<int>>();
  b.validate();
  return b;
}

json schedule_json(const PulseSchedule& s) {
  return {{"mode", to_string(s.mode)},
          {"num_slots", s.num_slots},
          {"slots", s.slots},
          {"phases", s.phases},
          {"ambiguity_factor", s.ambiguity_factor}};
}

PulseSchedule schedule_from(const json& j) {
  PulseSchedule s;
  s.mode = schedule_mode_from_string(j.at("mode").get<std::string>());
  s.num_slots = j.at("num_slots").get<int>();
  s.slots = j.at("slots").get<std::vector<int>>();
  s.phases = j.value("phases", std::vector<double>{});
  s.ambiguity_factor = j.value("ambiguity_factor", 1);
  s.validate();
  return s;
}

template <typename F>
auto parse_with_context(const std::string& text, const char* what, F&& f) {
  try {
    return f(json::parse(text));
  } catch (const json::exception& e) {
    throw FormatError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

std::string params_to_json(const RadarParams& params) { return params_json(params).dump(2); }

RadarParams params_from_json(const std::string& text) {
  return parse_with_context(text, "params", [](const json& j) { return params_from(j); });
}

std::string scene_to_json(const TargetScene& scene) {
  json targets = json::array();
  for (const Target& t : scene.targets)
    targets.push_back({{"delay_s", t.delay_s},
                       {"doppler_rad_s", t.doppler_rad_s},
                       {"azimuth_sine", t.azimuth_sine},
                       {"amplitude", complex_to_json(t.amplitude)}});
  return json{{"targets", targets}}.dump(2);
}

TargetScene scene_from_json(const std::string& text, const RadarParams& params) {
  return parse_with_context(text, "scene", [&](const json& j) {
    TargetScene scene;
    const json& list = j.contains("targets") ? j.at("targets") : j;
    for (const json& t : list) {
      Target target;
      if (t.contains("delay_bin")) {
        target.delay_s = t.at("delay_bin").get<double>() * params.delay_step_s();
      } else {
        target.delay_s = t.at("delay_s").get<double>();
      }
      if (t.contains("doppler_bin")) {
        target.doppler_rad_s = t.at("doppler_bin").get<double>() * params.doppler_step_rad_s();
      } else {
        target.doppler_rad_s = t.value("doppler_rad_s", 0.0);
      }
      target.azimuth_sine = t.value("azimuth_sine", 0.0);
      target.amplitude = t.contains("amplitude") ? complex_from_json(t.at("amplitude")) : Complex(1.0, 0.0);
      scene.targets.push_back(target);
    }
    return scene;
  });
}

std::string array_to_json(const ArrayGeometry& array) {
  return json{{"virtual_tx", array.virtual_tx},
              {"virtual_rx", array.virtual_rx},
              {"tx_positions", array.tx_positions},
              {"rx_positions", array.rx_positions},
              {"carriers_hz", array.carriers_hz}}
      .dump(2);
}

ArrayGeometry array_from_json(const std::string& text) {
  return parse_with_context(text, "array", [](const json& j) {
    ArrayGeometry a;
    a.virtual_tx = j.at("virtual_tx").get<int>();
    a.virtual_rx = j.at("virtual_rx").get<int>();
    a.tx_positions = j.at("tx_positions").get<std::vector<double>>();
    a.rx_positions = j.at("rx_positions").get<std::vector<double>>();
    a.carriers_hz = j.value("carriers_hz", std::vector<double>(a.tx_positions.size(), 0.0));
    a.validate();
    return a;
  });
}

std::string mimo_scene_to_json(const MimoScene& scene) {
  json targets = json::array();
  for (const MimoTarget& t : scene.targets)
    targets.push_back({{"delay_s", t.delay_s},
                       {"azimuth_sine", t.azimuth_sine},
                       {"doppler_hz", t.doppler_hz},
                       {"amplitude", complex_to_json(t.amplitude)}});
  return json{{"targets", targets}}.dump(2);
}

MimoScene mimo_scene_from_json(const std::string& text) {
  return parse_with_context(text, "mimo scene", [](const json& j) {
    MimoScene scene;
    for (const json& t : j.at("targets")) {
      MimoTarget target;
      target.delay_s = t.at("delay_s").get<double>();
      target.azimuth_sine = t.value("azimuth_sine", 0.0);
      target.doppler_hz = t.value("doppler_hz", 0.0);
      target.amplitude = t.contains("amplitude") ? complex_from_json(t.at("amplitude")) : Complex(1.0, 0.0);
      scene.targets.push_back(target);
    }
    return scene;
  });
}

void write_xamples(std::ostream& out, const XampleSet& x) {
  x.validate();
  json header{{"format", "xradar-xamples"},
              {"version", 1},
              {"params", params_json(x.params)},
              {"schedule", schedule_json(x.schedule)},
              {"kappa", selection_json(x.kappa)},
              {"num_rx", x.num_rx},
              {"channels", x.num_channels()},
              {"frames", x.num_frames()},
              {"coeffs", x.num_coeffs()}};
  if (!x.tx_kappa.empty()) {
    json list = json::array();
    for (const auto& b : x.tx_kappa) list.push_back(selection_json(b));
    header["tx_kappa"] = list;
  }
  out << header.dump() << '\n';
  out << "channel,frame";
  for (int j = 0; j < x.num_coeffs(); ++j) out << ",re_" << j << ",im_" << j;
  out << '\n';
  for (int ch = 0; ch < x.num_channels(); ++ch) {
    const CMatrix& c = x.channels[static_cast<std::size_t>(ch)];
    for (Index f = 0; f < c.rows(); ++f) {
      out << ch << ',' << f;
      for (Index j = 0; j < c.cols(); ++j) out << ',' << fmt(c(f, j).real()) << ',' << fmt(c(f, j).imag());
      out << '\n';
    }
  }
}

XampleSet read_xamples(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("xamples: missing header line");
  XampleSet x = parse_with_context(line, "xamples header", [](const json& h) {
    if (h.value("format", "") != "xradar-xamples") throw FormatError("xamples: not an xradar sample file");
    XampleSet s;
    s.params = params_from(h.at("params"));
    s.schedule = schedule_from(h.at("schedule"));
    s.kappa = selection_from(h.at("kappa"));
    s.num_rx = h.value("num_rx", 1);
    if (h.contains("tx_kappa"))
      for (const json& b : h.at("tx_kappa")) s.tx_kappa.push_back(selection_from(b));
    const int channels = h.at("channels").get<int>();
    const int frames = h.at("frames").get<int>();
    const int coeffs = h.at("coeffs").get<int>();
    if (channels < 1 || frames < 1 || coeffs < 1) throw FormatError("xamples: empty dimensions");
    s.channels.assign(static_cast<std::size_t>(channels), CMatrix::Zero(frames, coeffs));
    return s;
  });
  if (!std::getline(in, line) || line.rfind("channel,frame", 0) != 0) throw FormatError("xamples: missing CSV header");

  const int frames = x.num_frames();
  const int coeffs = x.num_coeffs();
  std::vector<bool> seen(static_cast<std::size_t>(x.num_channels() * frames), false);
  int row_count = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<double> values;
    while (std::getline(row, cell, ',')) {
      try {
        values.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw FormatError("xamples: bad number '" + cell + "' on data row " + std::to_string(row_count + 1));
      }
    }
    if (values.size() != static_cast<std::size_t>(2 + 2 * coeffs))
      throw FormatError("xamples: data row " + std::to_string(row_count + 1) + " has the wrong column count");
    const int ch = static_cast<int>(values[0]);
    const int f = static_cast<int>(values[1]);
    if (ch < 0 || ch >= x.num_channels() || f < 0 || f >= frames) throw FormatError("xamples: row index out of range");
    seen[static_cast<std::size_t>(ch * frames + f)] = true;
    CMatrix& c = x.channels[static_cast<std::size_t>(ch)];
    for (int j = 0; j < coeffs; ++j) c(f, j) = Complex(values[2 + 2 * j], values[3 + 2 * j]);
    ++row_count;
  }
  for (bool s : seen)
    if (!s) throw FormatError("xamples: missing data rows");
  try {
    x.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("xamples: ") + e.what());
  }
  return x;
}

void save_xamples(const std::string& path, const XampleSet& x) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_xamples(out, x);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

XampleSet load_xamples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_xamples(in);
}

void write_detections_csv(std::ostream& out, const RecoveryResult& result, const RadarParams* params, int azimuth_bins) {
  out << "delay_bin,doppler_bin,azimuth_bin,q,re_amp,im_amp,magnitude";
  if (params) out << ",delay_s,doppler_rad_s,azimuth_sine";
  out << '\n';
  const GridSpec grid = params ? GridSpec{params->num_nyquist_bins, params->num_pulses, std::max(1, azimuth_bins), 1}
                               : GridSpec{};
  for (const Detection& d : result.detections) {
    out << d.delay_bin << ',' << d.doppler_bin << ',' << d.azimuth_bin << ',' << d.ambiguity_order << ','
        << fmt(d.amplitude.real()) << ',' << fmt(d.amplitude.imag()) << ',' << fmt(d.magnitude());
    if (params) {
      QuantizedTarget q;
      q.delay_bin = d.delay_bin;
      q.doppler_bin = d.doppler_bin;
      q.azimuth_bin = d.azimuth_bin;
      q.ambiguity_order = d.ambiguity_order;
      const Target t = dequantize(q, GridSpec{grid.delay_bins, grid.doppler_bins, grid.azimuth_bins,
                                              std::max(1, d.ambiguity_order + 1)},
                                  *params);
      out << ',' << fmt(t.delay_s + d.delay_offset * params->delay_step_s()) << ','
          << fmt(t.doppler_rad_s + d.doppler_offset * params->doppler_step_rad_s()) << ',' << fmt(t.azimuth_sine);
    }
    out << '\n';
  }
}

std::string detections_to_json(const RecoveryResult& result) {
  json list = json::array();
  for (const Detection& d : result.detections)
    list.push_back({{"delay_bin", d.delay_bin},
                    {"doppler_bin", d.doppler_bin},
                    {"azimuth_bin", d.azimuth_bin},
                    {"q", d.ambiguity_order},
                    {"amplitude", complex_to_json(d.amplitude)},
                    {"delay_offset", d.delay_offset},
                    {"doppler_offset", d.doppler_offset}});
  return json{{"detections", list}, {"residual_energy", result.residual_energy}, {"iterations", result.iterations}}
      .dump(2);
}

void write_map_csv(std::ostream& out, const DelayDopplerMap& map) {
  const int p = map.doppler_bins();
  out << "delay_bin";
  for (int r = 0; r < p; ++r) out << ',' << r;
  out << '\n';
  for (int n = 0; n < map.delay_bins(); ++n) {
    out << n;
    // Columns follow the target Doppler convention.
    for (int r = 0; r < p; ++r) out << ',' << fmt(map.magnitudes(resign_doppler_bin(r, p), n));
    out << '\n';
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace xradar::io
