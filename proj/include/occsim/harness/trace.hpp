#pragma once

// Per-second packet reception under RoI jitter. Each camera frame carries
// bits_per_frame payload bits; it decodes when its RoI jitter stays within
// the tracking tolerance and it suffers no bit error. A packet is received
// only if all of its frames decode. Per-frame draws do not depend on the
// payload length, so longer packets see the same frame outcomes.

#include <cmath>
#include <cstdint>
#include <ostream>
#include <random>
#include <vector>

#include "occsim/core.hpp"
#include "occsim/harness/csv.hpp"

namespace occ::harness {

struct TraceConfig {
  double duration = 30;        // s
  double camera_fps = 30;
  int bits_per_frame = 8;
  int payload_bits = 32;
  double base_jitter = 0.8;    // px, std of the per-frame RoI displacement
  double burst_start = 18;     // s
  double burst_duration = 1;   // s
  double burst_jitter = 6;     // px
  double tolerance = 3;        // px
  double bit_error_rate = 0;
  std::uint64_t seed = 1;

  int frames_per_packet() const { return (payload_bits + bits_per_frame - 1) / bits_per_frame; }

  void validate() const {
    require(duration >= 10, "packet trace needs a duration of at least 10 s");
    require(camera_fps > 0, "camera fps must be positive");
    require(bits_per_frame > 0 && payload_bits > 0, "bit counts must be positive");
    require(frames_per_packet() <= camera_fps, "a packet must fit within one second of frames");
    require(base_jitter >= 0 && burst_jitter >= 0 && tolerance >= 0, "jitter parameters must be non-negative");
    require(bit_error_rate >= 0 && bit_error_rate <= 1, "bit error rate must lie in [0, 1]");
  }

  double jitter_sigma(double t) const {
    return (t >= burst_start && t < burst_start + burst_duration) ? burst_jitter : base_jitter;
  }
};

struct TraceRow {
  int second = 0;
  std::uint64_t packets = 0;
  std::uint64_t received = 0;
  double fraction = 1;
};

struct TraceResult {
  std::vector<TraceRow> rows;
  std::uint64_t packets = 0;
  std::uint64_t received = 0;
  double fraction() const { return packets ? static_cast<double>(received) / static_cast<double>(packets) : 1.0; }
};

/// Decode outcome of every frame in the run.
inline std::vector<bool> frame_outcomes(const TraceConfig& cfg) {
  cfg.validate();
  const auto frames = static_cast<std::size_t>(std::floor(cfg.duration * cfg.camera_fps + 1e-9));
  Rng rng = derive_stream(cfg.seed, 0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double frame_error = 1 - std::pow(1 - cfg.bit_error_rate, cfg.bits_per_frame);
  std::vector<bool> ok(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    const double t = static_cast<double>(f) / cfg.camera_fps;
    const double jitter = std::abs(cfg.jitter_sigma(t) * gauss(rng));
    const bool bit_error = u(rng) < frame_error;
    ok[f] = jitter <= cfg.tolerance && !bit_error;
  }
  return ok;
}

inline TraceResult run_packet_trace(const TraceConfig& cfg) {
  const auto ok = frame_outcomes(cfg);
  const auto fpp = static_cast<std::size_t>(cfg.frames_per_packet());
  TraceResult r;
  const int seconds = static_cast<int>(std::ceil(cfg.duration - 1e-9));
  r.rows.resize(static_cast<std::size_t>(seconds));
  for (int s = 0; s < seconds; ++s) r.rows[static_cast<std::size_t>(s)].second = s;
  for (std::size_t first = 0; first + fpp <= ok.size(); first += fpp) {
    bool all = true;
    for (std::size_t f = first; f < first + fpp; ++f) all = all && ok[f];
    const auto last = first + fpp - 1;
    const int s = std::min(seconds - 1, static_cast<int>(std::floor(static_cast<double>(last) / cfg.camera_fps)));
    auto& row = r.rows[static_cast<std::size_t>(s)];
    ++row.packets;
    ++r.packets;
    if (all) {
      ++row.received;
      ++r.received;
    }
  }
  for (auto& row : r.rows)
    row.fraction = row.packets ? static_cast<double>(row.received) / static_cast<double>(row.packets) : 1.0;
  return r;
}

inline void write_trace_csv(std::ostream& os, const TraceResult& r) {
  CsvWriter w(os, "trace", {"second", "packets", "received", "fraction"});
  for (const auto& row : r.rows) {
    w.cell(row.second).cell(row.packets).cell(row.received).cell(row.fraction);
    w.end_row();
  }
}

}  // namespace occ::harness
