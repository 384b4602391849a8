#pragma once

// Frame-slotted queue: transmitter frames arrive at the arrival rate, each
// carrying C packets of B bits, into a FIFO (unbounded unless max_queue is
// set); every service frame drains up to C packets.

#include <cmath>
#include <cstdint>
#include <ostream>
#include <random>
#include <vector>

#include "occsim/core.hpp"
#include "occsim/harness/csv.hpp"
#include "occsim/harness/parallel.hpp"

namespace occ::harness {

enum class ArrivalProcess { Deterministic, Poisson };

struct ThroughputConfig {
  std::vector<double> arrival_fps{5, 10, 15, 20, 30, 45, 60, 75, 90, 105, 120, 150, 180, 240};
  int packets_per_frame = 3;  // C
  int packet_bits = 64;       // B
  double service_fps = 90;    // decoder frame cadence draining the queue
  double duration = 60;       // s
  ArrivalProcess arrivals = ArrivalProcess::Deterministic;
  double loss_probability = 0;
  std::size_t max_queue = 0;  // 0: unbounded; else arrivals beyond it are dropped
  std::uint64_t seed = 1;
  unsigned threads = 1;

  double capacity_bps() const { return static_cast<double>(packets_per_frame) * packet_bits * service_fps; }

  void validate() const {
    require(!arrival_fps.empty(), "arrival rate list must not be empty");
    for (double a : arrival_fps) require(a > 0 && std::isfinite(a), "arrival rates must be positive");
    require(packets_per_frame > 0 && packet_bits > 0, "packets per frame and packet bits must be positive");
    require(service_fps > 0 && duration > 0, "service fps and duration must be positive");
    require(loss_probability >= 0 && loss_probability < 1, "loss probability must lie in [0, 1)");
  }
};

struct ThroughputPoint {
  double arrival_fps = 0;
  double throughput_bps = 0;
  std::uint64_t offered = 0;
  std::uint64_t delivered = 0;
  std::uint64_t lost = 0;
  std::uint64_t dropped = 0;
  std::uint64_t queued_at_end = 0;
  double capacity_bps = 0;
};

inline ThroughputPoint simulate_queue(const ThroughputConfig& cfg, double arrival_fps, Rng& rng) {
  ThroughputPoint p;
  p.arrival_fps = arrival_fps;
  p.capacity_bps = cfg.capacity_bps();
  std::exponential_distribution<double> gap(arrival_fps);
  std::bernoulli_distribution loss(cfg.loss_probability);
  std::uint64_t queue = 0;
  std::uint64_t arrival_index = 0;
  double next_arrival = cfg.arrivals == ArrivalProcess::Poisson ? gap(rng) : 0.0;
  std::uint64_t service_index = 0;
  for (;;) {
    const double next_service = static_cast<double>(service_index) / cfg.service_fps;
    const double t = std::min(next_arrival, next_service);
    if (t >= cfg.duration) break;
    if (next_arrival <= next_service) {  // arrivals at a service instant are served in it
      for (int k = 0; k < cfg.packets_per_frame; ++k) {
        ++p.offered;
        if (cfg.max_queue && queue >= cfg.max_queue) ++p.dropped;
        else ++queue;
      }
      ++arrival_index;
      next_arrival = cfg.arrivals == ArrivalProcess::Poisson ? next_arrival + gap(rng)
                                                             : static_cast<double>(arrival_index) / arrival_fps;
    } else {
      for (int k = 0; k < cfg.packets_per_frame && queue > 0; ++k) {
        --queue;
        if (cfg.loss_probability > 0 && loss(rng)) ++p.lost;
        else ++p.delivered;
      }
      ++service_index;
    }
  }
  p.queued_at_end = queue;
  p.throughput_bps = static_cast<double>(p.delivered) * cfg.packet_bits / cfg.duration;
  return p;
}

inline std::vector<ThroughputPoint> run_throughput(const ThroughputConfig& cfg) {
  cfg.validate();
  return parallel_map(cfg.arrival_fps.size(), cfg.threads, [&](std::size_t i) {
    Rng rng = derive_stream(cfg.seed, i);
    return simulate_queue(cfg, cfg.arrival_fps[i], rng);
  });
}

inline void write_throughput_csv(std::ostream& os, const std::vector<ThroughputPoint>& pts) {
  CsvWriter w(os, "throughput",
              {"arrival_fps", "throughput_bps", "offered", "delivered", "lost", "dropped", "queued_at_end",
               "capacity_bps"});
  for (const auto& p : pts) {
    w.cell(p.arrival_fps).cell(p.throughput_bps).cell(p.offered).cell(p.delivered).cell(p.lost).cell(p.dropped)
        .cell(p.queued_at_end).cell(p.capacity_bps);
    w.end_row();
  }
}

}  // namespace occ::harness
