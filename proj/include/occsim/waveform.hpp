#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "occsim/core.hpp"

namespace occ::modem {

enum class Scheme { NyquistOOK, UFSOOK, RollingShutterOOK, S2PSK };

inline std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::NyquistOOK: return "NyquistOOK";
    case Scheme::UFSOOK: return "UFSOOK";
    case Scheme::RollingShutterOOK: return "RollingShutterOOK";
    case Scheme::S2PSK: return "S2PSK";
  }
  return "?";
}

inline Scheme scheme_from_string(std::string_view s) {
  if (s == "NyquistOOK") return Scheme::NyquistOOK;
  if (s == "UFSOOK") return Scheme::UFSOOK;
  if (s == "RollingShutterOOK") return Scheme::RollingShutterOOK;
  if (s == "S2PSK") return Scheme::S2PSK;
  throw InvalidArgument("unknown modulation scheme '" + std::string(s) + "'");
}

/// What an LED group does during one timeline slot.
/// frequency_hz == 0: steady at `level`. Otherwise a 50% duty square wave
/// alternating between `level` and 0, on during the first half of each cycle.
struct Drive {
  double frequency_hz = 0;
  double level = 0;
  double phase = 0;  // cycles

  bool operator==(const Drive&) const = default;
};

namespace detail {

inline double frac(double x) { return x - std::floor(x); }

/// Integral over [0, x] of the unit square wave that is 1 on [0, 0.5) mod 1.
inline double square_integral(double x) {
  const double fl = std::floor(x);
  return 0.5 * fl + std::min(x - fl, 0.5);
}

}  // namespace detail

/// Per-slot LED drive schedule on a uniform timeline starting at t = 0.
/// Outside [0, duration) the LEDs sit at `idle_level` unless `repeat` is set,
/// in which case the schedule loops.
struct LedWaveform {
  Scheme scheme = Scheme::NyquistOOK;
  double slot_duration = 0;  // seconds
  double pulse_rate = 0;     // Hz; scheme-specific symbol/blink rate
  double bit_rate = 0;       // payload bits per second
  double phase = 0;          // global square-wave phase, cycles
  double idle_level = 0;
  bool repeat = false;
  std::vector<Drive> group_a;
  std::vector<Drive> group_b;  // empty: group B mirrors group A

  std::size_t slots() const noexcept { return group_a.size(); }
  double duration() const noexcept { return slot_duration * static_cast<double>(slots()); }

  const std::vector<Drive>& group(int g) const { return (g == 1 && !group_b.empty()) ? group_b : group_a; }

  /// Instantaneous LED level of group `g` at time t.
  double level_at(double t, int g = 0) const {
    const Drive* d = drive_at(t, g);
    if (!d) return idle_level;
    if (d->frequency_hz == 0) return d->level;
    return detail::frac(d->frequency_hz * t + phase + d->phase) < 0.5 ? d->level : 0.0;
  }

  /// Mean level of group `g` over [t0, t1].
  double mean_level(double t0, double t1, int g = 0) const {
    if (!(t1 > t0)) return level_at(t0, g);
    double acc = 0;
    double t = t0;
    while (t < t1) {
      const double seg_end = std::min(t1, next_boundary(t));
      acc += integrate_segment(t, seg_end, g);
      if (seg_end <= t) break;
      t = seg_end;
    }
    return acc / (t1 - t0);
  }

  /// Camera sample: instantaneous when exposure is zero, else the exposure mean.
  double sample(double t, double exposure, int g = 0) const {
    return exposure > 0 ? mean_level(t, t + exposure, g) : level_at(t, g);
  }

 private:
  double local_time(double t) const {
    if (!repeat || slots() == 0) return t;
    const double d = duration();
    return t - d * std::floor(t / d);
  }

  const Drive* drive_at(double t, int g) const {
    if (slots() == 0 || slot_duration <= 0) return nullptr;
    const double lt = local_time(t);
    if (lt < 0) return nullptr;
    const auto idx = static_cast<std::size_t>(std::floor(lt / slot_duration));
    if (idx >= slots()) return nullptr;
    return &group(g)[idx];
  }

  double next_boundary(double t) const {
    if (slots() == 0 || slot_duration <= 0) return std::numeric_limits<double>::infinity();
    const double lt = local_time(t);
    const double offset = t - lt;
    if (lt < 0) return offset;  // idle before start
    const double idx = std::floor(lt / slot_duration);
    if (idx >= static_cast<double>(slots())) {
      return repeat ? offset + duration() : std::numeric_limits<double>::infinity();
    }
    double next = offset + (idx + 1) * slot_duration;
    if (next <= t) next = std::nextafter(t, std::numeric_limits<double>::infinity());
    return next;
  }

  double integrate_segment(double a, double b, int g) const {
    const Drive* d = drive_at(0.5 * (a + b), g);
    if (!d) return idle_level * (b - a);
    if (d->frequency_hz == 0) return d->level * (b - a);
    const double f = d->frequency_hz;
    const double off = phase + d->phase;
    return d->level * (detail::square_integral(f * b + off) - detail::square_integral(f * a + off)) / f;
  }
};

}  // namespace occ::modem
