#pragma once

// Adaptive sampling policy and the fast-path temporal decoder.
//
// Situations: Normal (one or no vehicle), Spatial (several vehicles, slower
// wide-view processing at 1.5 T) and Temporal (a vehicle inside the distance
// threshold; decode it alone at T / 10).

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "occsim/core.hpp"
#include "occsim/detect/regions.hpp"
#include "occsim/detect/transform.hpp"
#include "occsim/image.hpp"
#include "occsim/modem.hpp"

namespace occ::controller {

enum class Case { Normal, Spatial, Temporal };

inline std::string_view to_string(Case c) {
  switch (c) {
    case Case::Normal: return "normal";
    case Case::Spatial: return "spatial";
    case Case::Temporal: return "temporal";
  }
  return "?";
}

struct Situation {
  Case kind = Case::Normal;
  std::optional<std::size_t> voi;  // index into the observations
  double nearest_distance = std::numeric_limits<double>::infinity();
};

/// Temporal when the nearest vehicle is closer than the threshold (ties go to
/// the smaller centroid x), else Spatial with more than one vehicle, else Normal.
inline Situation classify(const std::vector<double>& distances, std::size_t vehicle_count, double temporal_threshold,
                          const std::vector<double>& centroid_x = {}) {
  require(temporal_threshold > 0, "temporal threshold must be positive");
  require(centroid_x.empty() || centroid_x.size() == distances.size(), "one centroid per distance");
  Situation s;
  for (std::size_t i = 0; i < distances.size(); ++i) {
    const double d = distances[i];
    const bool closer = d < s.nearest_distance;
    const bool tie_left = s.voi && d == s.nearest_distance && !centroid_x.empty() &&
                          centroid_x[i] < centroid_x[*s.voi];
    if (closer || tie_left) {
      s.nearest_distance = d;
      s.voi = i;
    }
  }
  if (s.voi && s.nearest_distance < temporal_threshold) {
    s.kind = Case::Temporal;
  } else {
    s.kind = vehicle_count > 1 ? Case::Spatial : Case::Normal;
    s.voi.reset();
  }
  return s;
}

inline double sampling_interval(Case c, double base_interval) {
  require(base_interval > 0, "base interval must be positive");
  switch (c) {
    case Case::Normal: return base_interval;
    case Case::Spatial: return 1.5 * base_interval;
    case Case::Temporal: return base_interval / 10.0;
  }
  return base_interval;
}

// ---------------------------------------------------------------------------
// Robust inter-frame registration.

struct RansacParams {
  double sigma = 1.0;
  int max_rounds = 500;
  int max_refits = 20;
  double threshold() const { return std::sqrt(5.99) * sigma; }
};

struct HomographyResult {
  bool success = false;
  detect::Affine model;
  std::vector<std::size_t> inliers;
  int rounds = 0;
  int refits = 0;
};

namespace detail {

inline std::vector<std::size_t> inliers_of(const detect::Affine& a, const std::vector<Vec2>& src,
                                           const std::vector<Vec2>& dst, double t) {
  std::vector<std::size_t> in;
  for (std::size_t i = 0; i < src.size(); ++i)
    if ((a.apply(src[i]) - dst[i]).norm() < t) in.push_back(i);
  return in;
}

inline std::optional<detect::Affine> fit_subset(const std::vector<Vec2>& src, const std::vector<Vec2>& dst,
                                                const std::vector<std::size_t>& idx) {
  std::vector<Vec2> s, d;
  for (auto i : idx) {
    s.push_back(src[i]);
    d.push_back(dst[i]);
  }
  return detect::fit_affine(s, d);
}

}  // namespace detail

/// RANSAC over 4-point affine fits, then refits on the inliers until the
/// inlier set stops changing.
template <class Urbg>
HomographyResult estimate_homography(const std::vector<Vec2>& src, const std::vector<Vec2>& dst,
                                     const RansacParams& p, Urbg& rng) {
  require(src.size() == dst.size(), "correspondence lists differ in length");
  require(src.size() >= 4, "estimate_homography needs at least 4 correspondences");
  require(p.sigma > 0, "sigma must be positive");
  require(p.max_rounds > 0, "max_rounds must be positive");
  const double t = p.threshold();
  HomographyResult r;
  std::vector<std::size_t> all(src.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;

  double best_err = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> sample(4);
  for (int round = 0; round < p.max_rounds; ++round) {
    ++r.rounds;
    std::sample(all.begin(), all.end(), sample.begin(), 4, rng);
    const auto fit = detail::fit_subset(src, dst, sample);
    if (!fit) continue;  // degenerate sample
    const auto in = detail::inliers_of(*fit, src, dst, t);
    double err = 0;
    for (auto i : in) err += (fit->apply(src[i]) - dst[i]).squaredNorm();
    if (in.size() > r.inliers.size() || (in.size() == r.inliers.size() && err < best_err)) {
      r.inliers = in;
      r.model = *fit;
      best_err = err;
    }
    if (r.inliers.size() == src.size() && best_err == 0) break;
  }
  if (r.inliers.size() < 4) {
    r.inliers.clear();
    return r;
  }
  for (; r.refits < p.max_refits; ++r.refits) {
    const auto fit = detail::fit_subset(src, dst, r.inliers);
    if (!fit) break;
    const auto in = detail::inliers_of(*fit, src, dst, t);
    if (in.size() < 4) break;
    const bool stable = in == r.inliers;
    r.model = *fit;
    r.inliers = in;
    if (stable) break;
  }
  r.success = true;
  return r;
}

// ---------------------------------------------------------------------------
// Temporal decoding of one vehicle from a fast frame sequence.

struct TemporalDecodeConfig {
  modem::Scheme scheme = modem::Scheme::NyquistOOK;
  modem::UfsookConfig ufsook{};
  modem::UfsookDecodeOptions ufsook_options{};
  modem::UnclearThresholds thresholds{};
  double spot_threshold = 0.5;  // fraction of the brightest reference pixel
  int search_margin = 10;       // px around the predicted window
  double match_tolerance = 2.0; // px
  double core_fraction = 0.9;   // level mask keeps spot pixels above this share of the spot peak
  RansacParams ransac{0.5, 100, 20};
  /// Consecutive frames without any spot after which tracking is declared
  /// lost; 0 disables the rule (long OFF runs are legitimate in OOK).
  std::size_t max_dark_frames = 0;
  std::uint64_t seed = 1;
};

struct TemporalDecodeResult {
  modem::DemodResult demod;
  std::vector<detect::Transform2D> transforms;  // reference -> frame
  std::vector<double> levels;                   // group A (or whole VoI)
  std::vector<std::optional<double>> levels_b;  // S2PSK group B
  std::size_t frames_tracked = 0;
  bool tracking_lost = false;
};

namespace detail {

struct Spot {
  Vec2 centroid;
  std::vector<Vec2> pixels;
};

inline std::vector<Spot> spots_in(const Image& img, const PixelRect& window, double threshold) {
  const PixelRect w = window.clipped(img.width(), img.height());
  std::vector<Spot> out;
  if (w.empty()) return out;
  Mask m(img.width(), img.height());
  for (int y = w.y0; y < w.y1; ++y)
    for (int x = w.x0; x < w.x1; ++x)
      if (img(x, y) >= threshold) m.set(x, y);
  for (const auto& c : detect::connected_components(m)) {
    Spot s;
    Vec2 acc = Vec2::Zero();
    double wsum = 0;
    for (auto [x, y] : c.pixels) {
      s.pixels.emplace_back(x, y);
      acc += img(x, y) * Vec2(x, y);
      wsum += img(x, y);
    }
    s.centroid = acc / wsum;
    out.push_back(std::move(s));
  }
  return out;
}

inline PixelRect map_rect(const PixelRect& r, const detect::Transform2D& t) {
  double x0 = std::numeric_limits<double>::infinity(), y0 = x0, x1 = -x0, y1 = -x0;
  for (const Vec2& c : {Vec2(r.x0, r.y0), Vec2(r.x1, r.y0), Vec2(r.x0, r.y1), Vec2(r.x1, r.y1)}) {
    const Vec2 m = t.apply(c);
    x0 = std::min(x0, m.x());
    y0 = std::min(y0, m.y());
    x1 = std::max(x1, m.x());
    y1 = std::max(y1, m.y());
  }
  return {static_cast<int>(std::floor(x0)), static_cast<int>(std::floor(y0)), static_cast<int>(std::ceil(x1)),
          static_cast<int>(std::ceil(y1))};
}

inline double mean_mapped(const Image& img, const std::vector<Vec2>& pixels, const detect::Transform2D& t) {
  double s = 0;
  for (const auto& p : pixels) s += img.sample(t.apply(p).x(), t.apply(p).y());
  return pixels.empty() ? 0.0 : s / static_cast<double>(pixels.size());
}

}  // namespace detail

/// Registers each frame to the reference LED layout of the VoI, reads the LED
/// level through the registered mask and hands the level sequence to the
/// scheme's decoder.
inline TemporalDecodeResult temporal_decode(const std::vector<Frame>& frames, const detect::RoI& voi,
                                            const TemporalDecodeConfig& cfg = {}) {
  TemporalDecodeResult out;
  if (frames.empty()) return out;
  const PixelRect search = voi.bbox.expanded(cfg.search_margin);

  // Reference layout from the first frame in which the VoI shows light.
  std::size_t first = frames.size();
  std::vector<detail::Spot> ref;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto& img = frames[i].pixels;
    const PixelRect w = search.clipped(img.width(), img.height());
    double peak = 0;
    for (int y = w.y0; y < w.y1; ++y)
      for (int x = w.x0; x < w.x1; ++x) peak = std::max(peak, img(x, y));
    if (peak <= 0.1) continue;
    ref = detail::spots_in(img, w, cfg.spot_threshold * peak);
    if (!ref.empty()) {
      first = i;
      break;
    }
  }
  if (ref.empty()) return out;
  double ref_peak = 0;
  for (const auto& s : ref)
    for (const auto& p : s.pixels) ref_peak = std::max(ref_peak, frames[first].pixels(int(p.x()), int(p.y())));
  const double spot_thr = cfg.spot_threshold * ref_peak;

  PixelRect ref_box{frames[first].width(), frames[first].height(), 0, 0};
  for (const auto& s : ref)
    for (const auto& p : s.pixels)
      ref_box = {std::min(ref_box.x0, int(p.x())), std::min(ref_box.y0, int(p.y())),
                 std::max(ref_box.x1, int(p.x()) + 1), std::max(ref_box.y1, int(p.y()) + 1)};

  // S2PSK: split the reference spots into two groups at the median x.
  std::vector<double> xs;
  for (const auto& s : ref) xs.push_back(s.centroid.x());
  std::sort(xs.begin(), xs.end());
  const double split = xs.size() > 1 ? 0.5 * (xs[(xs.size() - 1) / 2] + xs[xs.size() / 2]) : xs[0];
  // Rim pixels are partly covered and swing with sub-pixel motion; read the core only.
  std::vector<Vec2> mask_all, mask_a, mask_b;
  for (const auto& s : ref) {
    const Image& img0 = frames[first].pixels;
    double top = 0;
    for (const auto& p : s.pixels) top = std::max(top, img0(int(p.x()), int(p.y())));
    std::vector<Vec2> core;
    for (const auto& p : s.pixels)
      if (img0(int(p.x()), int(p.y())) >= cfg.core_fraction * top) core.push_back(p);
    mask_all.insert(mask_all.end(), core.begin(), core.end());
    auto& g = s.centroid.x() < split || xs.size() == 1 ? mask_a : mask_b;
    g.insert(g.end(), core.begin(), core.end());
  }

  Rng rng = derive_stream(cfg.seed, 0);
  detect::Transform2D current;  // reference -> frame
  std::vector<std::optional<double>> level_a, level_b;
  std::size_t dark = 0;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const Image& img = frames[i].pixels;
    const PixelRect window = detail::map_rect(ref_box, current).expanded(cfg.search_margin);
    if (window.x0 < 0 || window.y0 < 0 || window.x1 > img.width() || window.y1 > img.height()) {
      out.tracking_lost = true;
      break;
    }
    const auto cur = detail::spots_in(img, window, spot_thr);
    dark = cur.empty() ? dark + 1 : 0;
    if (cfg.max_dark_frames > 0 && dark > cfg.max_dark_frames) {
      out.tracking_lost = true;
      break;
    }
    if (!cur.empty()) {
      // Translation vote: the offset that brings most reference spots onto a detection.
      Vec2 best_off = Vec2::Zero();
      int best_votes = -1;
      for (const auto& r : ref)
        for (const auto& c : cur) {
          const Vec2 off = c.centroid - current.apply(r.centroid);
          int votes = 0;
          for (const auto& r2 : ref) {
            const Vec2 q = current.apply(r2.centroid) + off;
            for (const auto& c2 : cur)
              if ((c2.centroid - q).norm() < cfg.match_tolerance) {
                ++votes;
                break;
              }
          }
          if (votes > best_votes || (votes == best_votes && off.norm() < best_off.norm())) {
            best_votes = votes;
            best_off = off;
          }
        }
      std::vector<Vec2> src, dst;
      for (const auto& r : ref) {
        const Vec2 q = current.apply(r.centroid) + best_off;
        double bd = cfg.match_tolerance;
        const detail::Spot* hit = nullptr;
        for (const auto& c : cur)
          if ((c.centroid - q).norm() < bd) {
            bd = (c.centroid - q).norm();
            hit = &c;
          }
        if (hit) {
          src.push_back(r.centroid);
          dst.push_back(hit->centroid);
        }
      }
      bool fitted = false;
      if (src.size() >= 4) {
        const auto h = estimate_homography(src, dst, cfg.ransac, rng);
        if (h.success) {
          // Similarity refit on the inliers; projecting the affine alone would
          // leave its translation tied to the image origin.
          std::vector<Vec2> si, di;
          for (auto k : h.inliers) {
            si.push_back(src[k]);
            di.push_back(dst[k]);
          }
          current = detect::fit_similarity(si, di);
          fitted = true;
        }
      }
      if (!fitted && !src.empty()) {
        Vec2 mean = Vec2::Zero();
        for (std::size_t k = 0; k < src.size(); ++k) mean += dst[k] - current.linear() * src[k];
        current.translation = mean / static_cast<double>(src.size());
      }
    }
    out.transforms.push_back(current);
    if (cfg.scheme == modem::Scheme::S2PSK) {
      level_a.push_back(mask_a.empty() ? std::nullopt : std::optional(detail::mean_mapped(img, mask_a, current)));
      level_b.push_back(mask_b.empty() ? std::nullopt : std::optional(detail::mean_mapped(img, mask_b, current)));
    } else {
      level_a.push_back(detail::mean_mapped(img, mask_all, current));
    }
    ++out.frames_tracked;
  }

  for (const auto& v : level_a) out.levels.push_back(v.value_or(0.0));
  out.levels_b = level_b;
  switch (cfg.scheme) {
    case modem::Scheme::NyquistOOK:
      out.demod = modem::decode_nyquist_ook(out.levels, cfg.thresholds);
      break;
    case modem::Scheme::UFSOOK:
      out.demod = modem::decode_ufsook(out.levels, cfg.ufsook, cfg.ufsook_options);
      break;
    case modem::Scheme::S2PSK:
      out.demod = modem::decode_s2psk(level_a, level_b);
      break;
    case modem::Scheme::RollingShutterOOK:
      throw InvalidArgument("temporal_decode: rolling-shutter payloads are decoded per frame");
  }
  if (out.tracking_lost) out.demod.frames_consumed = std::min(out.demod.frames_consumed, out.frames_tracked);
  return out;
}

// ---------------------------------------------------------------------------
// Policy state machine.

struct VehicleObservation {
  std::string id;
  double distance = 0;    // m
  double centroid_x = 0;  // px
};

struct PolicyRecord {
  double time = 0;
  Case kind = Case::Normal;
  std::string voi_id;  // empty unless Temporal
  double distance = 0; // nearest vehicle, or 0 when none
  double interval = 0;
};

class Controller {
 public:
  Controller(double base_interval, double temporal_threshold = 20.0)
      : base_(base_interval), threshold_(temporal_threshold) {
    require(base_interval > 0, "base interval must be positive");
    require(temporal_threshold > 0, "temporal threshold must be positive");
  }

  /// Classifies one slow-path snapshot and returns the time of the next one.
  const PolicyRecord& step(double time, const std::vector<VehicleObservation>& vehicles) {
    std::vector<double> d, x;
    for (const auto& v : vehicles) {
      d.push_back(v.distance);
      x.push_back(v.centroid_x);
    }
    const Situation s = classify(d, vehicles.size(), threshold_, x);
    PolicyRecord r;
    r.time = time;
    r.kind = s.kind;
    if (s.kind == Case::Temporal) r.voi_id = vehicles[*s.voi].id;
    r.distance = std::isfinite(s.nearest_distance) ? s.nearest_distance : 0.0;
    r.interval = sampling_interval(s.kind, base_);
    log_.push_back(r);
    return log_.back();
  }

  const std::vector<PolicyRecord>& log() const { return log_; }

  void write_csv(std::ostream& os) const {
    os << "# occsim policy v1\n";
    os << "time,case,voi_id,distance,interval\n";
    os << std::setprecision(12);
    for (const auto& r : log_)
      os << r.time << ',' << to_string(r.kind) << ',' << r.voi_id << ',' << r.distance << ',' << r.interval << '\n';
  }

 private:
  double base_;
  double threshold_;
  std::vector<PolicyRecord> log_;
};

}  // namespace occ::controller
