#pragma once

// Camera-link codecs.
//
// Link framing shared by all schemes: a start delimiter, a 16-bit MSB-first
// payload length, then the payload. NyquistOOK and S2PSK use the HDLC flag
// 01111110 as delimiter and bit-stuff the body (a 0 after every run of five
// 1s) so the flag cannot occur inside it. UFSOOK marks the start with a run of
// frames at a third, high frequency that integrates to half intensity within
// the exposure; RollingShutterOOK uses the chip sequence 111000, which is not
// a valid Manchester sequence.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "occsim/core.hpp"
#include "occsim/image.hpp"
#include "occsim/waveform.hpp"

namespace occ::modem {

struct Packet {
  Bits payload;
  std::size_t length() const noexcept { return payload.size(); }
};

inline const Bits& flag_sfd() {
  static const Bits flag{0, 1, 1, 1, 1, 1, 1, 0};
  return flag;
}

inline constexpr std::size_t kLengthBits = 16;
inline constexpr std::size_t kMaxPayloadBits = 65535;

struct DemodResult {
  Bits bits;
  std::size_t frames_consumed = 0;
  std::size_t unclear_frames = 0;
  std::size_t erasures = 0;  // payload bits that could not be decided (reported as 0)
  bool sync_found = false;
  bool complete = false;     // full advertised payload was read

  /// Packet usable by upper layers: synchronized, complete, no erasures.
  bool ok() const noexcept { return sync_found && complete && erasures == 0; }
};

/// Decision per frame (or per frame pair) before bit assembly.
enum class Symbol : std::int8_t { Zero = 0, One = 1, Erasure = -1 };

inline Symbol to_symbol(std::uint8_t bit) { return bit ? Symbol::One : Symbol::Zero; }

struct UnclearThresholds {
  double low = 0.33;
  double high = 0.66;

  void validate() const {
    require(low >= 0 && high <= 1 && low < high, "unclear thresholds must satisfy 0 <= low < high <= 1");
  }
};

namespace detail {

inline void check_payload(const Packet& p) {
  require(!p.payload.empty(), "payload must not be empty");
  require(p.payload.size() <= kMaxPayloadBits, "payload longer than 65535 bits");
  for (auto b : p.payload) require(b <= 1, "payload bits must be 0 or 1");
}

inline Bits length_header(std::size_t n) {
  Bits out(kLengthBits);
  for (std::size_t i = 0; i < kLengthBits; ++i) out[i] = (n >> (kLengthBits - 1 - i)) & 1u;
  return out;
}

inline Bits body_bits(const Packet& p) {
  Bits body = length_header(p.payload.size());
  body.reserve(body.size() + p.payload.size());
  for (auto b : p.payload) body.push_back(b);
  return body;
}

inline Bits stuff(const Bits& in) {
  Bits out;
  out.reserve(in.size() + in.size() / 5 + 1);
  int ones = 0;
  for (auto b : in) {
    out.push_back(b);
    ones = b ? ones + 1 : 0;
    if (ones == 5) {
      out.push_back(0);
      ones = 0;
    }
  }
  return out;
}

/// Reads length + payload from a symbol stream that starts right after the
/// delimiter. `consumed` is the number of stream symbols read.
struct BodyParse {
  Bits bits;
  std::size_t erasures = 0;
  bool complete = false;
  std::size_t consumed = 0;
};

inline BodyParse parse_body(std::span<const Symbol> stream, bool stuffed) {
  BodyParse out;
  std::size_t pos = 0;
  int ones = 0;
  auto next = [&](Symbol& s) -> bool {
    while (pos < stream.size()) {
      const Symbol raw = stream[pos++];
      if (stuffed && ones == 5) {
        ones = 0;  // stuffed zero, discard
        continue;
      }
      ones = (raw == Symbol::One) ? ones + 1 : 0;
      s = raw;
      return true;
    }
    return false;
  };
  std::size_t length = 0;
  for (std::size_t i = 0; i < kLengthBits; ++i) {
    Symbol s{};
    if (!next(s)) {
      out.consumed = pos;
      return out;
    }
    if (s == Symbol::Erasure) ++out.erasures;
    length = (length << 1) | (s == Symbol::One ? 1u : 0u);
  }
  // Header erasures make the length untrustworthy; report and stop.
  if (out.erasures > 0) {
    out.consumed = pos;
    return out;
  }
  out.bits.reserve(length);
  for (std::size_t i = 0; i < length; ++i) {
    Symbol s{};
    if (!next(s)) {
      out.consumed = pos;
      return out;
    }
    if (s == Symbol::Erasure) ++out.erasures;
    out.bits.push_back(s == Symbol::One ? 1 : 0);
  }
  out.complete = true;
  out.consumed = pos;
  return out;
}

inline std::optional<std::size_t> find_pattern(std::span<const Symbol> stream, const Bits& pattern,
                                               std::size_t from = 0) {
  if (stream.size() < pattern.size()) return std::nullopt;
  for (std::size_t i = from; i + pattern.size() <= stream.size(); ++i) {
    bool match = true;
    for (std::size_t j = 0; j < pattern.size() && match; ++j) match = stream[i + j] == to_symbol(pattern[j]);
    if (match) return i;
  }
  return std::nullopt;
}

struct Range {
  double lo = 0;
  double hi = 0;
  double span() const { return hi - lo; }
};

inline Range dynamic_range(std::span<const double> v) {
  Range r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (double x : v) {
    r.lo = std::min(r.lo, x);
    r.hi = std::max(r.hi, x);
  }
  return r;
}

inline bool is_harmonic(double f, double fps, double offset_cycles) {
  const double ratio = f / fps - offset_cycles;
  return ratio >= 0.5 && std::abs(ratio - std::round(ratio)) < 1e-9;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Nyquist-sampled OOK: frame rate = 2 x pulse rate, each bit held for two
// pulse slots (four frames), giving fps/4 bits per second.

enum class FrameState : std::int8_t { Dark, Bright, Unclear };

inline FrameState classify_frame(double normalized, const UnclearThresholds& th) {
  if (normalized <= th.low) return FrameState::Dark;
  if (normalized >= th.high) return FrameState::Bright;
  return FrameState::Unclear;
}

/// Pair rule: matching clear frames decide; an unclear frame defers to the
/// other frame; two unclear or two contradicting frames give an erasure.
inline Symbol decide_pair(FrameState a, FrameState b) {
  if (a == FrameState::Unclear && b == FrameState::Unclear) return Symbol::Erasure;
  if (a == FrameState::Unclear) return b == FrameState::Bright ? Symbol::One : Symbol::Zero;
  if (b == FrameState::Unclear) return a == FrameState::Bright ? Symbol::One : Symbol::Zero;
  if (a != b) return Symbol::Erasure;
  return a == FrameState::Bright ? Symbol::One : Symbol::Zero;
}

struct NyquistOptions {
  std::size_t preamble_bits = 2;
};

inline LedWaveform encode_nyquist_ook(const Packet& packet, int camera_fps, const NyquistOptions& opt = {}) {
  require(camera_fps > 0 && camera_fps % 2 == 0, "camera fps must be even and positive");
  detail::check_payload(packet);
  Bits air(opt.preamble_bits, 0);
  const Bits& sfd = flag_sfd();
  air.insert(air.end(), sfd.begin(), sfd.end());
  const Bits body = detail::stuff(detail::body_bits(packet));
  air.insert(air.end(), body.begin(), body.end());

  LedWaveform wf;
  wf.scheme = Scheme::NyquistOOK;
  wf.pulse_rate = camera_fps / 2.0;
  wf.slot_duration = 1.0 / wf.pulse_rate;
  wf.bit_rate = camera_fps / 4.0;
  wf.idle_level = 0;
  wf.group_a.reserve(air.size() * 2);
  for (auto b : air) {
    const Drive d{0.0, b ? 1.0 : 0.0, 0.0};
    wf.group_a.push_back(d);
    wf.group_a.push_back(d);
  }
  return wf;
}

inline DemodResult decode_nyquist_ook(std::span<const double> levels, const UnclearThresholds& th = {}) {
  th.validate();
  DemodResult best;
  if (levels.size() < 2) return best;
  const auto range = detail::dynamic_range(levels);
  if (!(range.span() > 1e-12)) return best;

  std::vector<FrameState> states(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i)
    states[i] = classify_frame((levels[i] - range.lo) / range.span(), th);

  std::optional<std::size_t> best_start;
  for (std::size_t offset = 0; offset < 4; ++offset) {
    std::vector<Symbol> bits;
    for (std::size_t f = offset; f + 3 < states.size(); f += 4) {
      const Symbol s1 = decide_pair(states[f], states[f + 1]);
      const Symbol s2 = decide_pair(states[f + 2], states[f + 3]);
      Symbol b = Symbol::Erasure;
      if (s1 == Symbol::Erasure) b = s2;
      else if (s2 == Symbol::Erasure || s1 == s2) b = s1;
      bits.push_back(b);
    }
    const auto pos = detail::find_pattern(bits, flag_sfd());
    if (!pos) continue;
    const std::size_t start_frame = offset + 4 * *pos;
    const auto body_start = *pos + flag_sfd().size();
    const auto parse = detail::parse_body(std::span<const Symbol>(bits).subspan(body_start), true);
    const bool better = !best_start || start_frame < *best_start ||
                        (start_frame == *best_start && parse.erasures < best.erasures);
    if (!better) continue;
    best_start = start_frame;
    best = DemodResult{};
    best.sync_found = true;
    best.bits = parse.bits;
    best.erasures = parse.erasures;
    best.complete = parse.complete;
    best.frames_consumed = std::min(states.size(), offset + 4 * (body_start + parse.consumed));
  }
  for (std::size_t i = 0; i < best.frames_consumed; ++i)
    if (states[i] == FrameState::Unclear) ++best.unclear_frames;
  if (!best.sync_found) best.bits.clear();
  return best;
}

// ---------------------------------------------------------------------------
// Undersampled frequency-shift OOK. Each bit occupies two frame periods at
// either the space frequency (an integer harmonic of the frame rate, sampled
// as a steady state) or the mark frequency (harmonic plus half the frame rate,
// sampled as a toggling state).

struct UfsookConfig {
  double camera_fps = 30;
  double space_hz = 120;
  double mark_hz = 105;
  double sfd_hz = 20000;     // integrates to half intensity over the exposure
  std::size_t sfd_frames = 4;
  double flicker_floor_hz = 100;

  void validate() const {
    require(camera_fps > 0, "camera fps must be positive");
    if (space_hz <= flicker_floor_hz || mark_hz <= flicker_floor_hz || sfd_hz <= flicker_floor_hz)
      throw InvalidArgument("flicker violation: UFSOOK frequencies must exceed 100 Hz");
    require(detail::is_harmonic(space_hz, camera_fps, 0.0), "space frequency must be an integer harmonic of the frame rate");
    require(detail::is_harmonic(mark_hz, camera_fps, 0.5),
            "mark frequency must be a frame-rate harmonic offset by half the frame rate");
    require(sfd_hz != space_hz && sfd_hz != mark_hz, "SFD frequency must differ from mark and space");
    require(sfd_frames >= 2, "SFD needs at least two frames");
  }
};

inline LedWaveform encode_ufsook(const Packet& packet, const UfsookConfig& cfg, double initial_phase = 0.0) {
  cfg.validate();
  detail::check_payload(packet);
  LedWaveform wf;
  wf.scheme = Scheme::UFSOOK;
  wf.slot_duration = 1.0 / cfg.camera_fps;
  wf.pulse_rate = cfg.camera_fps;
  wf.bit_rate = cfg.camera_fps / 2.0;
  wf.phase = initial_phase;
  wf.idle_level = 0;
  for (std::size_t i = 0; i < cfg.sfd_frames; ++i) wf.group_a.push_back({cfg.sfd_hz, 1.0, 0.0});
  for (auto b : detail::body_bits(packet)) {
    const Drive d{b ? cfg.mark_hz : cfg.space_hz, 1.0, 0.0};
    wf.group_a.push_back(d);
    wf.group_a.push_back(d);
  }
  return wf;
}

struct UfsookDecodeOptions {
  UnclearThresholds thresholds{};
  /// Level of a fully-on LED. When absent the largest observed level is used.
  std::optional<double> full_scale;
};

inline DemodResult decode_ufsook(std::span<const double> levels, const UfsookConfig& cfg,
                                 const UfsookDecodeOptions& opt = {}) {
  cfg.validate();
  opt.thresholds.validate();
  DemodResult out;
  if (levels.size() < cfg.sfd_frames + 2) return out;
  double lo = 0;
  double scale = opt.full_scale.value_or(0.0);
  if (!opt.full_scale) {
    const auto r = detail::dynamic_range(levels);
    lo = r.lo;
    scale = r.span();
  }
  if (!(scale > 1e-12)) return out;
  auto norm = [&](std::size_t i) { return (levels[i] - lo) / scale; };

  std::optional<std::size_t> start;
  std::size_t run = 0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const FrameState s = classify_frame(norm(i), opt.thresholds);
    run = (s == FrameState::Unclear) ? run + 1 : 0;
    if (run == cfg.sfd_frames) {
      start = i + 1 - cfg.sfd_frames;
      break;
    }
  }
  if (!start) return out;
  out.sync_found = true;
  const std::size_t data0 = *start + cfg.sfd_frames;

  std::vector<double> diffs;
  for (std::size_t f = data0; f + 1 < levels.size(); f += 2) diffs.push_back(std::abs(norm(f) - norm(f + 1)));
  if (diffs.empty()) return out;
  const auto [dmin, dmax] = std::minmax_element(diffs.begin(), diffs.end());
  // Every pair in a packet shares the same sampling phase, so mark pairs share
  // one toggle depth and space pairs sit near zero; split halfway.
  const double split = (*dmax - *dmin) > 1e-9 ? 0.5 * (*dmin + *dmax) : std::numeric_limits<double>::infinity();
  std::vector<Symbol> symbols;
  symbols.reserve(diffs.size());
  for (double d : diffs) symbols.push_back(d > split ? Symbol::One : Symbol::Zero);

  const auto parse = detail::parse_body(symbols, false);
  out.bits = parse.bits;
  out.erasures = parse.erasures;
  out.complete = parse.complete;
  out.frames_consumed = std::min(levels.size(), data0 + 2 * parse.consumed);
  for (std::size_t i = 0; i < out.frames_consumed; ++i)
    if (classify_frame(norm(i), opt.thresholds) == FrameState::Unclear) ++out.unclear_frames;
  return out;
}

// ---------------------------------------------------------------------------
// Rolling-shutter OOK: Manchester chips at twice the LED frequency, so an
// alternating chip pattern is a square wave at led_hz and each chip spans
// 1 / (2 f t_row) sensor rows. Rising mid-bit transition encodes 1.

inline const Bits& rolling_sfd_chips() {
  static const Bits chips{1, 1, 1, 0, 0, 0};
  return chips;
}

inline LedWaveform encode_rolling_ook(const Packet& packet, double led_hz) {
  require(led_hz > 0, "LED frequency must be positive");
  detail::check_payload(packet);
  LedWaveform wf;
  wf.scheme = Scheme::RollingShutterOOK;
  wf.pulse_rate = led_hz;
  wf.slot_duration = 1.0 / (2.0 * led_hz);
  wf.bit_rate = led_hz;
  wf.idle_level = 0;
  for (auto c : rolling_sfd_chips()) wf.group_a.push_back({0.0, c ? 1.0 : 0.0, 0.0});
  for (auto b : detail::body_bits(packet)) {
    wf.group_a.push_back({0.0, b ? 0.0 : 1.0, 0.0});
    wf.group_a.push_back({0.0, b ? 1.0 : 0.0, 0.0});
  }
  return wf;
}

/// LED frequency must exceed the frame rate and stay below the row-scan rate.
inline void validate_rolling_rate(double led_hz, double camera_fps, double row_time) {
  require(row_time > 0, "row time must be positive");
  require(led_hz > camera_fps, "LED frequency must exceed the camera frame rate");
  require(led_hz < 1.0 / row_time, "LED frequency must stay below the row-scan frequency");
}

/// Band width in rows produced by a square wave at `led_hz`.
inline double rolling_band_rows(double led_hz, double row_time) { return 1.0 / (2.0 * led_hz * row_time); }

/// Per-row mean intensity within `roi` (whole frame when absent).
inline std::vector<double> row_profile(const Frame& frame, std::optional<PixelRect> roi = std::nullopt) {
  const PixelRect r = roi.value_or(PixelRect{0, 0, frame.width(), frame.height()}).clipped(frame.width(), frame.height());
  std::vector<double> rows;
  for (int y = r.y0; y < r.y1; ++y) {
    double s = 0;
    for (int x = r.x0; x < r.x1; ++x) s += frame.pixels(x, y);
    rows.push_back(r.width() > 0 ? s / r.width() : 0.0);
  }
  return rows;
}

/// Runs of equal thresholded state along a profile.
struct Run {
  bool high = false;
  std::size_t length = 0;
};

inline std::vector<Run> band_runs(std::span<const double> profile) {
  std::vector<Run> runs;
  const auto r = detail::dynamic_range(profile);
  if (profile.empty() || !(r.span() > 1e-9)) return runs;
  const double mid = 0.5 * (r.lo + r.hi);
  for (double v : profile) {
    const bool high = v > mid;
    if (runs.empty() || runs.back().high != high) runs.push_back({high, 0});
    ++runs.back().length;
  }
  return runs;
}

inline DemodResult decode_rolling_ook(const Frame& frame, double row_time, std::span<const double> led_hz_candidates,
                                      std::optional<PixelRect> roi = std::nullopt) {
  require(row_time > 0, "row time must be positive");
  require(!led_hz_candidates.empty(), "at least one LED frequency candidate is required");
  DemodResult out;
  const auto profile = row_profile(frame, roi);
  const auto runs = band_runs(profile);
  if (runs.size() < 2) return out;  // no bands

  std::vector<double> candidates(led_hz_candidates.begin(), led_hz_candidates.end());
  std::sort(candidates.begin(), candidates.end());
  bool any_resolvable = false;
  for (double f : candidates) {
    const double w = rolling_band_rows(f, row_time);
    if (w < 1.0) continue;
    any_resolvable = true;
    std::vector<Symbol> chips;
    for (const auto& run : runs) {
      const auto n = std::max<long>(1, std::lround(static_cast<double>(run.length) / w));
      chips.insert(chips.end(), static_cast<std::size_t>(n), run.high ? Symbol::One : Symbol::Zero);
    }
    const auto pos = detail::find_pattern(chips, rolling_sfd_chips());
    if (!pos) continue;
    std::vector<Symbol> bits;
    for (std::size_t i = *pos + rolling_sfd_chips().size(); i + 1 < chips.size(); i += 2) {
      const Symbol a = chips[i];
      const Symbol b = chips[i + 1];
      if (a == Symbol::Zero && b == Symbol::One) bits.push_back(Symbol::One);
      else if (a == Symbol::One && b == Symbol::Zero) bits.push_back(Symbol::Zero);
      else bits.push_back(Symbol::Erasure);
    }
    const auto parse = detail::parse_body(bits, false);
    out.sync_found = true;
    out.bits = parse.bits;
    out.erasures = parse.erasures;
    out.complete = parse.complete;
    out.frames_consumed = 1;
    return out;
  }
  if (!any_resolvable) throw DomainError("undersampled: band width below one row for every LED frequency candidate");
  return out;
}

// ---------------------------------------------------------------------------
// Spatial 2-phase shift keying: two LED groups blink at the same frequency;
// in phase encodes 0, anti-phase encodes 1. One bit per camera frame. The
// blink frequency is a frame-rate harmonic plus half the frame rate, so each
// group's sampled state toggles every frame.

struct S2pskConfig {
  double camera_fps = 30;
  double blink_hz = 105;
  std::size_t preamble_bits = 8;

  void validate() const {
    require(camera_fps > 0, "camera fps must be positive");
    require(blink_hz > 100, "flicker violation: blink frequency must exceed 100 Hz");
    require(detail::is_harmonic(blink_hz, camera_fps, 0.5),
            "blink frequency must be a frame-rate harmonic offset by half the frame rate");
  }
};

inline LedWaveform encode_s2psk(const Packet& packet, const S2pskConfig& cfg, double initial_phase = 0.0) {
  cfg.validate();
  detail::check_payload(packet);
  Bits air(cfg.preamble_bits, 0);
  air.insert(air.end(), flag_sfd().begin(), flag_sfd().end());
  const Bits body = detail::stuff(detail::body_bits(packet));
  air.insert(air.end(), body.begin(), body.end());
  LedWaveform wf;
  wf.scheme = Scheme::S2PSK;
  wf.slot_duration = 1.0 / cfg.camera_fps;
  wf.pulse_rate = cfg.blink_hz;
  wf.bit_rate = cfg.camera_fps;
  wf.phase = initial_phase;
  wf.idle_level = 0;
  for (auto b : air) {
    wf.group_a.push_back({cfg.blink_hz, 1.0, 0.0});
    wf.group_b.push_back({cfg.blink_hz, 1.0, b ? 0.5 : 0.0});
  }
  return wf;
}

/// Fraction of unmasked emitters brighter than `on_threshold`; nullopt when
/// every emitter of the group is masked.
inline std::optional<double> masked_group_level(std::span<const double> emitter_levels,
                                                std::span<const std::uint8_t> masked, double on_threshold) {
  require(masked.empty() || masked.size() == emitter_levels.size(), "mask size must match emitter count");
  std::size_t visible = 0;
  std::size_t on = 0;
  for (std::size_t i = 0; i < emitter_levels.size(); ++i) {
    if (!masked.empty() && masked[i]) continue;
    ++visible;
    if (emitter_levels[i] > on_threshold) ++on;
  }
  if (visible == 0) return std::nullopt;
  return static_cast<double>(on) / static_cast<double>(visible);
}

inline DemodResult decode_s2psk(std::span<const std::optional<double>> group_a,
                                std::span<const std::optional<double>> group_b) {
  require(group_a.size() == group_b.size(), "group sequences must have equal length");
  DemodResult out;
  auto states = [](std::span<const std::optional<double>> g) {
    std::vector<std::optional<bool>> s(g.size());
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& v : g)
      if (v) {
        lo = std::min(lo, *v);
        hi = std::max(hi, *v);
      }
    if (!(hi - lo > 1e-12)) return s;  // occluded or never changing: undecidable
    const double mid = 0.5 * (lo + hi);
    for (std::size_t i = 0; i < g.size(); ++i)
      if (g[i]) s[i] = *g[i] > mid;
    return s;
  };
  const auto a = states(group_a);
  const auto b = states(group_b);
  std::vector<Symbol> symbols(a.size(), Symbol::Erasure);
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] && b[i]) symbols[i] = (*a[i] != *b[i]) ? Symbol::One : Symbol::Zero;

  const auto pos = detail::find_pattern(symbols, flag_sfd());
  if (!pos) {
    out.erasures = static_cast<std::size_t>(std::count(symbols.begin(), symbols.end(), Symbol::Erasure));
    return out;
  }
  const std::size_t body_start = *pos + flag_sfd().size();
  const auto parse = detail::parse_body(std::span<const Symbol>(symbols).subspan(body_start), true);
  out.sync_found = true;
  out.bits = parse.bits;
  out.erasures = parse.erasures;
  out.complete = parse.complete;
  out.frames_consumed = body_start + parse.consumed;
  return out;
}

// ---------------------------------------------------------------------------
// Ideal receivers: sample the waveform directly at frame instants.

/// Frame-instant samples t_n = t0 + n / fps.
inline std::vector<double> sample_frames(const LedWaveform& wf, double fps, double t0, std::size_t count,
                                         double exposure = 0.0, int group = 0) {
  require(fps > 0, "fps must be positive");
  std::vector<double> out(count);
  for (std::size_t n = 0; n < count; ++n) out[n] = wf.sample(t0 + static_cast<double>(n) / fps, exposure, group);
  return out;
}

/// Number of frames needed to cover the waveform from t0.
inline std::size_t frames_to_cover(const LedWaveform& wf, double fps, double t0, std::size_t extra = 4) {
  return static_cast<std::size_t>(std::ceil((wf.duration() - t0) * fps)) + extra;
}

/// A one-column rolling-shutter frame with row r sampled at t0 + r * row_time.
inline Frame sample_rolling_frame(const LedWaveform& wf, int rows, double row_time, double t0, double exposure = 0.0) {
  require(rows > 0, "row count must be positive");
  Frame f;
  f.pixels = Image(1, rows);
  f.timestamp = t0;
  f.camera_id = "ideal";
  for (int r = 0; r < rows; ++r) f.pixels(0, r) = wf.sample(t0 + r * row_time, exposure);
  return f;
}

}  // namespace occ::modem
