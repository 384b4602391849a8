#pragma once

// Monte Carlo BER against SNR for two receivers sharing every random draw.
//
//  adaptive: decides on the transmitter RoI only, so interference reaches it
//            only from sources whose image overlaps an accepted RoI;
//  standard: a single non-imaging decision on the summed light, so every
//            interference source adds to the decision variable.
//
// Both use the midpoint threshold h R Pt with known gain. Interference is the
// source's relative brightness at the symbol instant times its intensity,
// scaled by the responsivity and a coupling factor.

#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "occsim/channel.hpp"
#include "occsim/core.hpp"
#include "occsim/detect/regions.hpp"
#include "occsim/harness/csv.hpp"
#include "occsim/harness/parallel.hpp"
#include "occsim/harness/scenarios.hpp"
#include "occsim/numerics.hpp"
#include "occsim/scene.hpp"

namespace occ::harness {

inline constexpr std::uint64_t kMinBerSymbols = 10000;

struct BerSweepConfig {
  std::vector<double> snr_db{0, 5, 10, 13, 16, 20};  // +inf means noiseless
  std::uint64_t symbols = 100000;
  double symbol_rate = 30;  // Hz
  double coupling = 1.0;
  channel::ChannelParams channel{};  // noise_std is set per point
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

struct InterferenceModel {
  std::vector<scene::NoiseSourceSpec> all;
  std::vector<scene::NoiseSourceSpec> leaking;  // overlap an accepted RoI
  std::size_t accepted_rois = 0;
};

/// Renders the scene noise-free for a few frames, runs RoI detection and
/// records which interference sources fall inside accepted RoIs.
inline InterferenceModel analyse_interference(const scene::Scene& sc, const scene::CameraModel& cam,
                                              const detect::DetectParams& dp = {}, int frames = 4) {
  InterferenceModel m;
  m.all = sc.noise;
  if (sc.empty()) return m;
  channel::ChannelParams clean;
  Rng rng = derive_stream(0, 0);
  std::vector<Frame> fs;
  for (int i = 0; i < frames; ++i) fs.push_back(scene::render(sc, cam, i / cam.fps, clean, rng));
  const auto rois = detect::detect_rois(fs, dp);
  m.accepted_rois = rois.size();
  for (const auto& n : sc.noise) {
    const PixelRect fp = noise_footprint(n, cam);
    for (const auto& r : rois)
      if (fp.intersects(r.bbox)) {
        m.leaking.push_back(n);
        break;
      }
  }
  return m;
}

struct BerPoint {
  double snr_db = 0;
  std::string receiver;
  std::uint64_t symbols = 0;
  std::uint64_t errors = 0;
  double ber = 0;
  double ci_low = 0;
  double ci_high = 0;
  double theory = 0;
};

inline double ber_theory_at(const channel::ChannelParams& base, double snr_db) {
  if (std::isinf(snr_db) && snr_db > 0) return 0.0;
  channel::ChannelParams p = base;
  p.noise_std = channel::noise_std_for_snr(p.transmit_power_avg, p.responsivity, channel::db_to_linear(snr_db));
  return channel::faded_ook_ber_theory(p);
}

inline std::vector<BerPoint> run_ber_sweep(const BerSweepConfig& cfg, const InterferenceModel& im) {
  if (cfg.symbols < kMinBerSymbols) throw InvalidArgument("insufficient symbols: at least 10^4 per SNR point");
  require(cfg.symbol_rate > 0, "symbol rate must be positive");
  require(!cfg.snr_db.empty(), "SNR list must not be empty");
  cfg.channel.validate();

  auto point = [&](std::size_t i) {
    const double snr_db = cfg.snr_db[i];
    require(!std::isnan(snr_db) && !(std::isinf(snr_db) && snr_db < 0), "SNR must be a number or +inf");
    channel::ChannelParams ch = cfg.channel;
    ch.noise_std = std::isinf(snr_db)
                       ? 0.0
                       : channel::noise_std_for_snr(ch.transmit_power_avg, ch.responsivity, channel::db_to_linear(snr_db));
    Rng rng = derive_stream(cfg.seed, i);
    std::bernoulli_distribution coin(0.5);
    std::uniform_real_distribution<double> phase(0.0, 1.0);
    const double on = ch.on_level();
    const double k = cfg.coupling * ch.responsivity;
    std::uint64_t err_a = 0, err_s = 0;
    for (std::uint64_t s = 0; s < cfg.symbols; ++s) {
      const bool bit = coin(rng);
      const double h = channel::sample_gain(ch, rng);
      const double y = channel::transmit(bit ? on : 0.0, ch, h, rng).received;
      const double t = (static_cast<double>(s) + phase(rng)) / cfg.symbol_rate;
      double all = 0, leak = 0;
      for (const auto& n : im.all) all += n.intensity * n.temporal(t);
      for (const auto& n : im.leaking) leak += n.intensity * n.temporal(t);
      const double threshold = h * ch.responsivity * ch.transmit_power_avg;
      if ((y + k * leak > threshold) != bit) ++err_a;
      if ((y + k * all > threshold) != bit) ++err_s;
    }
    const double theory = ber_theory_at(cfg.channel, snr_db);
    std::vector<BerPoint> rows;
    for (auto [name, errors] : {std::pair<const char*, std::uint64_t>{"adaptive", err_a}, {"standard", err_s}}) {
      BerPoint p;
      p.snr_db = snr_db;
      p.receiver = name;
      p.symbols = cfg.symbols;
      p.errors = errors;
      p.ber = static_cast<double>(errors) / static_cast<double>(cfg.symbols);
      const auto ci = numerics::wilson_interval(errors, cfg.symbols);
      p.ci_low = ci.low;
      p.ci_high = ci.high;
      p.theory = theory;
      rows.push_back(p);
    }
    return rows;
  };

  std::vector<BerPoint> out;
  for (auto& rows : parallel_map(cfg.snr_db.size(), cfg.threads, point))
    out.insert(out.end(), rows.begin(), rows.end());
  return out;
}

inline void write_ber_csv(std::ostream& os, const std::vector<BerPoint>& pts) {
  CsvWriter w(os, "ber", {"snr_db", "receiver", "ber", "symbols", "errors", "ci_low", "ci_high", "theory"});
  for (const auto& p : pts) {
    w.cell(p.snr_db).cell(p.receiver).cell(p.ber).cell(p.symbols).cell(p.errors).cell(p.ci_low).cell(p.ci_high).cell(
        p.theory);
    w.end_row();
  }
}

}  // namespace occ::harness
