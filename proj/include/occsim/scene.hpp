#pragma once

// Synthetic camera frames: LED arrays and interfering light sources projected
// through a pinhole camera, sampled by a global or rolling shutter and passed
// through the optical channel per pixel.
//
// World axes: X right, Y down, Z forward (optical axis). The principal point
// sits at the image centre ((W-1)/2, (H-1)/2).

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "occsim/channel.hpp"
#include "occsim/core.hpp"
#include "occsim/image.hpp"
#include "occsim/waveform.hpp"

namespace occ::scene {

enum class Shutter { Global, Rolling };

struct CameraModel {
  std::string id = "cam";
  double focal_length = 0.01;  // m
  double pixel_size = 1e-5;    // m
  int width = 640;
  int height = 480;
  double fps = 30;
  Shutter shutter = Shutter::Global;
  double row_time = 0;  // s, rolling shutter only
  double exposure = 0;  // s; 0 = instantaneous
  Vec3 position = Vec3::Zero();
  Vec2 principal_offset = Vec2::Zero();  // px, models image jitter

  double focal_px() const { return focal_length / pixel_size; }

  Vec2 principal_point() const {
    return Vec2((width - 1) / 2.0, (height - 1) / 2.0) + principal_offset;
  }

  void validate() const {
    require(focal_length > 0 && pixel_size > 0, "focal length and pixel size must be positive");
    require(width > 0 && height > 0, "resolution must be positive");
    require(fps > 0, "fps must be positive");
    require(exposure >= 0, "exposure must be non-negative");
    if (shutter == Shutter::Rolling) {
      require(row_time > 0, "rolling shutter needs a positive row time");
      require(row_time * height <= 1.0 / fps * (1 + 1e-12), "rolling readout exceeds the frame period");
    }
  }

  /// Sample instant of row `row` for a frame starting at `t`.
  double row_start(double t, int row) const { return shutter == Shutter::Rolling ? t + row * row_time : t; }
};

inline Vec2 project(const Vec3& world_point, const CameraModel& cam) {
  const Vec3 p = world_point - cam.position;
  if (!(p.z() > 0)) throw DomainError("point behind camera (depth <= 0)");
  return cam.principal_point() + cam.focal_px() * Vec2(p.x(), p.y()) / p.z();
}

/// Transmitter: a left and a right LED unit, each a rows x cols grid.
struct LedArraySpec {
  std::string id = "veh";
  int rows = 2;
  int cols = 2;
  Vec3 world_position = Vec3(0, 0, 10);  // midpoint between the two units
  double emitter_spacing = 0.1;           // m
  double emitter_radius = 0.04;           // m
  double left_right_separation = 1.5;     // m
  std::vector<int> group_labels;          // per emitter (left unit first); empty: left 0, right 1
  double intensity = 1.0;
  std::shared_ptr<const modem::LedWaveform> waveform;  // null: steady on
  double time_offset = 0;                              // waveform time = t - time_offset

  std::size_t emitters_per_unit() const { return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols); }
  std::size_t emitter_count() const { return 2 * emitters_per_unit(); }

  void validate() const {
    require(rows > 0 && cols > 0, "LED grid must be non-empty");
    require(left_right_separation > 0, "left/right separation must be positive");
    require(emitter_spacing >= 0 && emitter_radius > 0, "emitter geometry must be positive");
    require(intensity >= 0, "intensity must be non-negative");
    require(group_labels.empty() || group_labels.size() == emitter_count(), "one group label per emitter");
    for (int g : group_labels) require(g == 0 || g == 1, "group labels must be 0 or 1");
  }

  int group_of(std::size_t emitter) const {
    if (!group_labels.empty()) return group_labels[emitter];
    return emitter < emitters_per_unit() ? 0 : 1;
  }

  Vec3 unit_center(int unit) const {
    const double half = 0.5 * left_right_separation;
    return world_position + Vec3(unit == 0 ? -half : half, 0, 0);
  }

  /// Emitter index layout: unit-major, then row-major within the unit.
  Vec3 emitter_position(std::size_t emitter) const {
    const auto per = emitters_per_unit();
    const int unit = emitter < per ? 0 : 1;
    const auto local = emitter % per;
    const int r = static_cast<int>(local) / cols;
    const int c = static_cast<int>(local) % cols;
    return unit_center(unit) +
           Vec3((c - (cols - 1) / 2.0) * emitter_spacing, (r - (rows - 1) / 2.0) * emitter_spacing, 0);
  }

  /// Drive level of `emitter` averaged over [t, t + exposure].
  double level(std::size_t emitter, double t, double exposure) const {
    if (!waveform) return intensity;
    return intensity * waveform->sample(t - time_offset, exposure, group_of(emitter));
  }
};

enum class NoiseCategory { AcLighting, NeonBallast, LedScreen };
enum class NoiseShape { Disc, Rect };

inline std::string to_string(NoiseCategory c) {
  switch (c) {
    case NoiseCategory::AcLighting: return "ac";
    case NoiseCategory::NeonBallast: return "neon";
    case NoiseCategory::LedScreen: return "screen";
  }
  return "?";
}

struct FrequencyBand {
  double lo = 0;
  double hi = 0;
};

/// Flicker band per interference category.
inline FrequencyBand category_band(NoiseCategory c) {
  switch (c) {
    case NoiseCategory::AcLighting: return {1.0, 5e3};
    case NoiseCategory::NeonBallast: return {1e4, 1e5};
    case NoiseCategory::LedScreen: return {1e5, 1e6};
  }
  return {};
}

inline double default_frequency(NoiseCategory c) {
  switch (c) {
    case NoiseCategory::AcLighting: return 60.0;  // mains; rectified light flickers at 120 Hz
    case NoiseCategory::NeonBallast: return 3e4;
    case NoiseCategory::LedScreen: return 3e5;
  }
  return 0;
}

struct NoiseSourceSpec {
  NoiseCategory category = NoiseCategory::AcLighting;
  Vec3 world_position = Vec3(0, 0, 10);
  double intensity = 1.0;
  double extent_w = 10;  // px
  double extent_h = 10;  // px
  NoiseShape shape = NoiseShape::Disc;
  double frequency = 60.0;
  double phase = 0.0;  // cycles

  void validate() const {
    const auto band = category_band(category);
    require(frequency >= band.lo && frequency <= band.hi,
            "noise source frequency outside its category band (" + to_string(category) + ")");
    require(intensity >= 0, "noise intensity must be non-negative");
    require(extent_w > 0 && extent_h > 0, "noise extent must be positive");
  }

  /// Instantaneous relative brightness in [0, 1].
  double temporal(double t) const {
    if (category == NoiseCategory::AcLighting) return std::abs(std::sin(2 * kPi * (frequency * t + phase)));
    return modem::detail::frac(frequency * t + phase) < 0.5 ? 1.0 : 0.0;
  }

  /// Mean relative brightness over [t, t + exposure].
  double temporal_mean(double t, double exposure) const {
    if (!(exposure > 0)) return temporal(t);
    const double a = frequency * t + phase;
    const double b = frequency * (t + exposure) + phase;
    if (category == NoiseCategory::AcLighting) {
      // Antiderivative of |sin(2 pi x)| in cycles.
      auto F = [](double x) {
        const double h = 2 * x;  // half-cycles
        const double fl = std::floor(h);
        return (2 * fl + 1 - std::cos(kPi * (h - fl))) / (2 * kPi);
      };
      return (F(b) - F(a)) / (b - a);
    }
    return (modem::detail::square_integral(b) - modem::detail::square_integral(a)) / (b - a);
  }
};

/// Static brightness ramp above the horizon row.
struct SkySpec {
  int horizon_row = 240;
  double top = 0.6;
  double bottom = 0.3;
};

struct Scene {
  std::vector<LedArraySpec> arrays;
  std::vector<NoiseSourceSpec> noise;
  std::optional<SkySpec> sky;
  std::vector<PixelRect> occluders;  // image-space, block all light

  bool empty() const { return arrays.empty() && noise.empty() && !sky; }

  void validate() const {
    for (const auto& a : arrays) a.validate();
    for (const auto& n : noise) n.validate();
  }
};

/// Projected footprint of one emitter.
struct EmitterImage {
  std::size_t array = 0;
  std::size_t emitter = 0;
  int unit = 0;
  int group = 0;
  Vec2 center;
  double radius_px = 0;
};

inline std::vector<EmitterImage> project_emitters(const Scene& scene, const CameraModel& cam) {
  std::vector<EmitterImage> out;
  for (std::size_t a = 0; a < scene.arrays.size(); ++a) {
    const auto& arr = scene.arrays[a];
    for (std::size_t e = 0; e < arr.emitter_count(); ++e) {
      const Vec3 p = arr.emitter_position(e);
      const double z = p.z() - cam.position.z();
      EmitterImage img;
      img.array = a;
      img.emitter = e;
      img.unit = e < arr.emitters_per_unit() ? 0 : 1;
      img.group = arr.group_of(e);
      img.center = project(p, cam);
      img.radius_px = cam.focal_px() * arr.emitter_radius / z;
      out.push_back(img);
    }
  }
  return out;
}

/// Pixel bounding box of a disc with anti-aliased rim.
inline PixelRect disc_box(const Vec2& c, double r) {
  return {static_cast<int>(std::floor(c.x() - r - 1)), static_cast<int>(std::floor(c.y() - r - 1)),
          static_cast<int>(std::ceil(c.x() + r + 1)) + 1, static_cast<int>(std::ceil(c.y() + r + 1)) + 1};
}

/// Ground-truth bounding box of each transmitter unit (left, right) per array.
inline std::vector<std::pair<std::size_t, PixelRect>> unit_boxes(const Scene& scene, const CameraModel& cam) {
  std::vector<std::pair<std::size_t, PixelRect>> boxes;
  std::vector<PixelRect> acc(scene.arrays.size() * 2);
  std::vector<bool> seen(acc.size(), false);
  for (const auto& e : project_emitters(scene, cam)) {
    const std::size_t k = e.array * 2 + static_cast<std::size_t>(e.unit);
    const PixelRect b = disc_box(e.center, e.radius_px);
    if (!seen[k]) {
      acc[k] = b;
      seen[k] = true;
    } else {
      acc[k] = {std::min(acc[k].x0, b.x0), std::min(acc[k].y0, b.y0), std::max(acc[k].x1, b.x1),
                std::max(acc[k].y1, b.y1)};
    }
  }
  for (std::size_t k = 0; k < acc.size(); ++k)
    if (seen[k]) boxes.emplace_back(k / 2, acc[k]);
  return boxes;
}

/// Anti-aliased disc coverage of pixel centre (x, y).
inline double disc_coverage(double x, double y, const Vec2& c, double r) {
  const double d = std::hypot(x - c.x(), y - c.y());
  return std::clamp(r + 0.5 - d, 0.0, 1.0);
}

namespace detail {

inline bool occluded(const Scene& s, int x, int y) {
  for (const auto& o : s.occluders)
    if (o.contains(x, y)) return true;
  return false;
}

/// Adds `level(row) * coverage` for every pixel of a footprint.
template <class Level, class Coverage>
void splat(Image& img, const PixelRect& box, Level&& level, Coverage&& coverage) {
  const PixelRect b = box.clipped(img.width(), img.height());
  for (int y = b.y0; y < b.y1; ++y) {
    const double l = level(y);
    if (l == 0) continue;
    for (int x = b.x0; x < b.x1; ++x) {
      const double c = coverage(x, y);
      if (c > 0) img(x, y) += l * c;
    }
  }
}

}  // namespace detail

/// Noise-free optical intensity image before the channel.
inline Image render_intensity(const Scene& scene, const CameraModel& cam, double t) {
  cam.validate();
  scene.validate();
  Image img(cam.width, cam.height, 0.0);

  if (scene.sky) {
    const auto& s = *scene.sky;
    const int h = std::clamp(s.horizon_row, 0, cam.height);
    for (int y = 0; y < h; ++y) {
      const double v = h > 1 ? s.top + (s.bottom - s.top) * y / (h - 1.0) : s.top;
      for (int x = 0; x < cam.width; ++x) img(x, y) += v;
    }
  }

  for (const auto& n : scene.noise) {
    const Vec2 c = project(n.world_position, cam);
    const double hw = 0.5 * n.extent_w;
    const double hh = 0.5 * n.extent_h;
    const PixelRect box = disc_box(c, std::max(hw, hh));
    auto level = [&](int row) { return n.intensity * n.temporal_mean(cam.row_start(t, row), cam.exposure); };
    if (n.shape == NoiseShape::Disc) {
      detail::splat(img, box, level, [&](int x, int y) { return disc_coverage(x, y, c, hw); });
    } else {
      detail::splat(img, box, level, [&](int x, int y) {
        return (std::abs(x - c.x()) <= hw && std::abs(y - c.y()) <= hh) ? 1.0 : 0.0;
      });
    }
  }

  for (const auto& e : project_emitters(scene, cam)) {
    const auto& arr = scene.arrays[e.array];
    auto level = [&](int row) { return arr.level(e.emitter, cam.row_start(t, row), cam.exposure); };
    detail::splat(img, disc_box(e.center, e.radius_px), level,
                  [&](int x, int y) { return disc_coverage(x, y, e.center, e.radius_px); });
  }

  for (auto& v : img.data()) v = std::min(v, 1.0);
  if (!scene.occluders.empty())
    for (int y = 0; y < img.height(); ++y)
      for (int x = 0; x < img.width(); ++x)
        if (detail::occluded(scene, x, y)) img(x, y) = 0;
  return img;
}

/// Rendered frame: optical intensity through the channel, clipped to [0, 1].
template <class Urbg>
Frame render(const Scene& scene, const CameraModel& cam, double t, const channel::ChannelParams& ch, Urbg& rng,
             double gain = 1.0) {
  ch.validate();
  Frame f;
  f.pixels = render_intensity(scene, cam, t);
  f.timestamp = t;
  f.camera_id = cam.id;
  require(gain > 0 && gain <= 1, "channel gain must lie in (0, 1]");
  // Same law as channel::transmit, applied over the whole frame.
  const double k = gain * ch.responsivity;
  if (ch.noise_std == 0) {
    for (auto& v : f.pixels.data()) v = std::clamp(k * v, 0.0, 1.0);
  } else {
    std::normal_distribution<double> noise(0.0, ch.noise_std);
    for (auto& v : f.pixels.data()) v = std::clamp(k * v + noise(rng), 0.0, 1.0);
  }
  return f;
}

/// Right camera of a parallel-axis rig, displaced by `baseline` along +X.
inline CameraModel right_camera(const CameraModel& left, double baseline) {
  require(baseline > 0, "stereo baseline must be positive");
  CameraModel r = left;
  r.id = left.id + "_right";
  r.position = left.position + Vec3(baseline, 0, 0);
  return r;
}

template <class Urbg>
std::pair<Frame, Frame> render_stereo(const Scene& scene, const CameraModel& left, double baseline, double t,
                                      const channel::ChannelParams& ch, Urbg& rng) {
  const CameraModel right = right_camera(left, baseline);
  Frame l = render(scene, left, t, ch, rng);
  Frame r = render(scene, right, t, ch, rng);
  return {std::move(l), std::move(r)};
}

/// Frame start times of a camera from t0.
inline std::vector<double> frame_times(const CameraModel& cam, double t0, std::size_t count) {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = t0 + static_cast<double>(i) / cam.fps;
  return out;
}

}  // namespace occ::scene
