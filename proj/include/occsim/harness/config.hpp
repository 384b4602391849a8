#pragma once

// Scenario configuration read from an INI file. Sections:
//   [run] seed threads scheme
//   [channel] power responsivity noise_std fading_k fading_z
//   [ber] snr_db symbols symbol_rate coupling
//   [throughput] arrival_fps service_fps packets_per_frame packet_bits duration arrivals loss max_queue
//   [trace] duration bits_per_frame payload_bits base_jitter burst_start burst_duration burst_jitter tolerance bit_error_rate
//   [camera] [vehicle.N] [noise.N] [sky] [occluder.N]
//   [detect] threshold dilate max_area_fraction min_fill min_area near_area horizon
//   [stereo] baseline window max_disparity uniqueness subpixel
//   [controller] base_interval temporal_threshold
// Every section is optional. Any invalid value raises ConfigError.

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "occsim/channel.hpp"
#include "occsim/detect/regions.hpp"
#include "occsim/harness/ber.hpp"
#include "occsim/harness/throughput.hpp"
#include "occsim/harness/trace.hpp"
#include "occsim/modem.hpp"
#include "occsim/ranging.hpp"
#include "occsim/scene.hpp"
#include "occsim/scene_io.hpp"

namespace occ::harness {

struct StereoConfig {
  double baseline = 0.3;  // m
  ranging::SadParams sad{};
};

struct ControllerConfig {
  double base_interval = 1.0 / 30;  // s
  double temporal_threshold = 20;   // m
};

struct ScenarioConfig {
  std::uint64_t seed = 1;
  unsigned threads = 1;
  modem::Scheme scheme = modem::Scheme::NyquistOOK;
  channel::ChannelParams channel{};
  BerSweepConfig ber{};
  ThroughputConfig throughput{};
  TraceConfig trace{};
  scene::CameraModel camera{};
  scene::Scene scene{};
  detect::DetectParams detect{};
  StereoConfig stereo{};
  ControllerConfig controller{};
};

/// Comma- or whitespace-separated numbers.
inline std::vector<double> parse_number_list(const std::string& text, const std::string& where) {
  std::string s = text;
  for (char& c : s)
    if (c == ',') c = ' ';
  std::istringstream is(s);
  std::vector<double> out;
  std::string tok;
  while (is >> tok) {
    try {
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::exception&) {
      if (tok == "inf") {
        out.push_back(std::numeric_limits<double>::infinity());
        continue;
      }
      throw ConfigError(where + ": cannot parse number '" + tok + "'");
    }
  }
  if (out.empty()) throw ConfigError(where + ": empty list");
  return out;
}

namespace detail {

inline const io::Tree& section(const io::Tree& root, const std::string& name) {
  static const io::Tree empty;
  const auto node = root.get_child_optional(name);
  return node ? *node : empty;
}

}  // namespace detail

inline ScenarioConfig scenario_from(const io::Tree& root) {
  using io::get;
  ScenarioConfig c;

  const auto& run = detail::section(root, "run");
  c.seed = get<std::uint64_t>(run, "seed", c.seed, "run");
  c.threads = get(run, "threads", c.threads, "run");
  if (c.threads == 0) throw ConfigError("[run] threads must be positive");
  try {
    c.scheme = modem::scheme_from_string(get<std::string>(run, "scheme", std::string(modem::to_string(c.scheme)), "run"));
  } catch (const Error& e) {
    throw ConfigError(std::string("[run] ") + e.what());
  }

  c.channel = io::validated("channel", [&] {
    const auto& s = detail::section(root, "channel");
    channel::ChannelParams ch;
    ch.transmit_power_avg = get(s, "power", ch.transmit_power_avg, "channel");
    ch.responsivity = get(s, "responsivity", ch.responsivity, "channel");
    ch.noise_std = get(s, "noise_std", ch.noise_std, "channel");
    if (s.get_child_optional("fading_k") || s.get_child_optional("fading_z")) {
      channel::FadingParams f;
      f.shape_k = get(s, "fading_k", f.shape_k, "channel");
      f.scale_z = get(s, "fading_z", f.scale_z, "channel");
      ch.fading = f;
    }
    ch.validate();
    return ch;
  });

  {
    const auto& s = detail::section(root, "ber");
    auto& b = c.ber;
    if (const auto v = s.get_child_optional("snr_db")) b.snr_db = parse_number_list(v->data(), "[ber] snr_db");
    b.symbols = get<std::uint64_t>(s, "symbols", b.symbols, "ber");
    b.symbol_rate = get(s, "symbol_rate", b.symbol_rate, "ber");
    b.coupling = get(s, "coupling", b.coupling, "ber");
    if (b.symbols < kMinBerSymbols) throw ConfigError("[ber] symbols: insufficient symbols (need at least 10000)");
    if (!(b.symbol_rate > 0)) throw ConfigError("[ber] symbol_rate must be positive");
    if (!(b.coupling >= 0)) throw ConfigError("[ber] coupling must be non-negative");
    b.channel = c.channel;
    b.seed = c.seed;
    b.threads = c.threads;
  }

  c.camera = io::camera_from(root, "camera");

  c.throughput = io::validated("throughput", [&] {
    const auto& s = detail::section(root, "throughput");
    ThroughputConfig t;
    if (const auto v = s.get_child_optional("arrival_fps")) t.arrival_fps = parse_number_list(v->data(), "[throughput] arrival_fps");
    t.packets_per_frame = get(s, "packets_per_frame", t.packets_per_frame, "throughput");
    t.packet_bits = get(s, "packet_bits", t.packet_bits, "throughput");
    t.service_fps = get(s, "service_fps", t.service_fps, "throughput");
    t.duration = get(s, "duration", t.duration, "throughput");
    const auto arrivals = get<std::string>(s, "arrivals", "deterministic", "throughput");
    if (arrivals == "deterministic") t.arrivals = ArrivalProcess::Deterministic;
    else if (arrivals == "poisson") t.arrivals = ArrivalProcess::Poisson;
    else throw ConfigError("[throughput] arrivals must be deterministic or poisson");
    t.loss_probability = get(s, "loss", t.loss_probability, "throughput");
    t.max_queue = get(s, "max_queue", t.max_queue, "throughput");
    t.seed = c.seed;
    t.threads = c.threads;
    t.validate();
    return t;
  });

  c.trace = io::validated("trace", [&] {
    const auto& s = detail::section(root, "trace");
    TraceConfig t;
    t.duration = get(s, "duration", t.duration, "trace");
    t.camera_fps = c.camera.fps;
    t.bits_per_frame = get(s, "bits_per_frame", t.bits_per_frame, "trace");
    t.payload_bits = get(s, "payload_bits", t.payload_bits, "trace");
    t.base_jitter = get(s, "base_jitter", t.base_jitter, "trace");
    t.burst_start = get(s, "burst_start", t.burst_start, "trace");
    t.burst_duration = get(s, "burst_duration", t.burst_duration, "trace");
    t.burst_jitter = get(s, "burst_jitter", t.burst_jitter, "trace");
    t.tolerance = get(s, "tolerance", t.tolerance, "trace");
    t.bit_error_rate = get(s, "bit_error_rate", t.bit_error_rate, "trace");
    t.seed = c.seed;
    t.validate();
    return t;
  });

  c.scene = io::scene_from(root);
  io::validated("scene", [&] {
    c.scene.validate();
    return 0;
  });

  {
    const auto& s = detail::section(root, "detect");
    auto& d = c.detect;
    d.threshold = get(s, "threshold", d.threshold, "detect");
    d.dilate_radius = get(s, "dilate", d.dilate_radius, "detect");
    d.shape.max_area_fraction = get(s, "max_area_fraction", d.shape.max_area_fraction, "detect");
    d.shape.min_fill = get(s, "min_fill", d.shape.min_fill, "detect");
    d.shape.min_area = get(s, "min_area", d.shape.min_area, "detect");
    d.shape.near_area = get(s, "near_area", d.shape.near_area, "detect");
    if (s.get_child_optional("horizon")) d.shape.horizon_row = get(s, "horizon", 0, "detect");
    if (!(d.threshold > 0 && d.threshold < 1)) throw ConfigError("[detect] threshold must lie in (0, 1)");
    if (d.dilate_radius < 0) throw ConfigError("[detect] dilate must be non-negative");
    if (!(d.shape.max_area_fraction > 0 && d.shape.max_area_fraction <= 1))
      throw ConfigError("[detect] max_area_fraction must lie in (0, 1]");
    if (!(d.shape.min_fill >= 0 && d.shape.min_fill <= 1)) throw ConfigError("[detect] min_fill must lie in [0, 1]");
  }

  {
    const auto& s = detail::section(root, "stereo");
    auto& st = c.stereo;
    st.baseline = get(s, "baseline", st.baseline, "stereo");
    st.sad.window = get(s, "window", st.sad.window, "stereo");
    st.sad.max_disparity = get(s, "max_disparity", st.sad.max_disparity, "stereo");
    st.sad.uniqueness = get(s, "uniqueness", st.sad.uniqueness, "stereo");
    st.sad.subpixel = get(s, "subpixel", st.sad.subpixel, "stereo");
    if (!(st.baseline > 0)) throw ConfigError("[stereo] baseline must be positive");
    if (st.sad.window <= 0 || st.sad.window % 2 == 0) throw ConfigError("[stereo] window must be odd and positive");
    if (st.sad.max_disparity < 0) throw ConfigError("[stereo] max_disparity must be non-negative");
  }

  {
    const auto& s = detail::section(root, "controller");
    auto& ct = c.controller;
    ct.base_interval = get(s, "base_interval", ct.base_interval, "controller");
    ct.temporal_threshold = get(s, "temporal_threshold", ct.temporal_threshold, "controller");
    if (!(ct.base_interval > 0)) throw ConfigError("[controller] base_interval must be positive");
    if (!(ct.temporal_threshold > 0)) throw ConfigError("[controller] temporal_threshold must be positive");
  }
  return c;
}

inline ScenarioConfig load_scenario(const std::string& path) { return scenario_from(io::read_ini_file(path)); }

}  // namespace occ::harness
