#pragma once

// Scene builders shared by the CLI, tests and acceptance suite.

#include <algorithm>
#include <memory>
#include <random>
#include <vector>

#include "occsim/core.hpp"
#include "occsim/modem.hpp"
#include "occsim/scene.hpp"

namespace occ::harness {

/// Every LED toggles on every frame: S2PSK preamble (in-phase groups) at a
/// blink frequency that is a frame-rate harmonic plus half the frame rate.
inline std::shared_ptr<const modem::LedWaveform> toggling_waveform(double camera_fps) {
  modem::LedWaveform wf;
  wf.scheme = modem::Scheme::S2PSK;
  wf.slot_duration = 1.0 / camera_fps;
  wf.pulse_rate = 3.5 * camera_fps;
  wf.phase = 0.25;  // frame instants land mid-half-cycle, away from the edges
  wf.repeat = true;
  wf.group_a.assign(8, modem::Drive{wf.pulse_rate, 1.0, 0.0});
  return std::make_shared<const modem::LedWaveform>(std::move(wf));
}

struct DetectionSceneParams {
  int min_vehicles = 1;
  int max_vehicles = 5;
  int min_noise = 0;
  int max_noise = 3;
  double min_depth = 6;
  double max_depth = 30;
  int margin_px = 8;  // clearance between footprints and from the border
};

/// Image-space footprint of a noise source.
inline PixelRect noise_footprint(const scene::NoiseSourceSpec& n, const scene::CameraModel& cam) {
  const Vec2 c = scene::project(n.world_position, cam);
  const double hw = 0.5 * n.extent_w + 1, hh = 0.5 * n.extent_h + 1;
  return {static_cast<int>(std::floor(c.x() - hw)), static_cast<int>(std::floor(c.y() - hh)),
          static_cast<int>(std::ceil(c.x() + hw)) + 1, static_cast<int>(std::ceil(c.y() + hh)) + 1};
}

struct DetectionScene {
  scene::Scene scene;
  std::vector<PixelRect> unit_boxes;   // ground truth, one per LED unit
  std::vector<PixelRect> noise_boxes;  // ground truth, one per noise source
};

/// Random scene of modulated vehicles plus interference that must be rejected:
/// steady-looking mains lamps (flicker harmonic with the frame rate), elongated
/// neon tubes and large flickering screens.
template <class Urbg>
DetectionScene random_detection_scene(Urbg& rng, const scene::CameraModel& cam, const DetectionSceneParams& p = {}) {
  std::uniform_int_distribution<int> nveh(p.min_vehicles, p.max_vehicles);
  std::uniform_int_distribution<int> nnoise(p.min_noise, p.max_noise);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto wf = toggling_waveform(cam.fps);
  DetectionScene out;
  std::vector<PixelRect> taken;
  const PixelRect frame{p.margin_px, p.margin_px, cam.width - p.margin_px, cam.height - p.margin_px};
  auto fits = [&](const PixelRect& r) {
    if (r.x0 < frame.x0 || r.y0 < frame.y0 || r.x1 > frame.x1 || r.y1 > frame.y1) return false;
    for (const auto& t : taken)
      if (r.expanded(p.margin_px).intersects(t)) return false;
    return true;
  };

  const int vehicles = nveh(rng);
  for (int v = 0, attempts = 0; v < vehicles && attempts < 2000; ++attempts) {
    scene::LedArraySpec a;
    a.id = "veh" + std::to_string(v);
    const double z = p.min_depth + (p.max_depth - p.min_depth) * u(rng);
    const double half_w = (cam.width / 2.0 - 40) * z / cam.focal_px();
    const double half_h = (cam.height / 2.0 - 30) * z / cam.focal_px();
    a.world_position = Vec3((2 * u(rng) - 1) * half_w, (0.8 * u(rng) - 0.2) * half_h, z);
    a.waveform = wf;
    scene::Scene probe;
    probe.arrays.push_back(a);
    const auto boxes = scene::unit_boxes(probe, cam);
    if (!fits(boxes[0].second) || !fits(boxes[1].second)) continue;
    for (const auto& b : boxes) {
      taken.push_back(b.second);
      out.unit_boxes.push_back(b.second);
    }
    out.scene.arrays.push_back(a);
    ++v;
  }

  const int sources = nnoise(rng);
  for (int k = 0, attempts = 0; k < sources && attempts < 2000; ++attempts) {
    scene::NoiseSourceSpec n;
    const double z = 8 + 30 * u(rng);
    const double kind = u(rng);
    if (kind < 0.34) {
      n.category = scene::NoiseCategory::AcLighting;  // round lamp, flicker harmonic with the frame rate
      n.shape = scene::NoiseShape::Disc;
      n.frequency = 60;
      n.phase = u(rng);
      n.extent_w = n.extent_h = 6 + 14 * u(rng);
    } else if (kind < 0.67) {
      n.category = scene::NoiseCategory::NeonBallast;  // tube
      n.shape = scene::NoiseShape::Rect;
      n.frequency = 1e4 + 9e4 * u(rng);
      n.extent_w = 40 + 60 * u(rng);
      n.extent_h = 3 + 4 * u(rng);
      if (u(rng) < 0.5) std::swap(n.extent_w, n.extent_h);
    } else {
      n.category = scene::NoiseCategory::LedScreen;  // billboard
      n.shape = scene::NoiseShape::Rect;
      n.frequency = 1e5 + 9e5 * u(rng);
      if (u(rng) < 0.5) {
        n.extent_h = 12 + 20 * u(rng);
        n.extent_w = n.extent_h * (3.2 + 2 * u(rng));
      } else {
        n.extent_w = 180 + 60 * u(rng);
        n.extent_h = 100 + 30 * u(rng);
      }
    }
    n.intensity = 0.6 + 0.4 * u(rng);
    const double half_w = (cam.width / 2.0 - 20) * z / cam.focal_px();
    const double half_h = (cam.height / 2.0 - 20) * z / cam.focal_px();
    n.world_position = Vec3((2 * u(rng) - 1) * half_w, (2 * u(rng) - 1) * half_h, z);
    const PixelRect box = noise_footprint(n, cam);
    if (!fits(box)) continue;
    taken.push_back(box);
    out.noise_boxes.push_back(box);
    out.scene.noise.push_back(n);
    ++k;
  }
  return out;
}

/// One transmitter with interference sources spread across the frame, used
/// by the BER sweep when the configuration brings no scene of its own.
inline scene::Scene default_interference_scene(double camera_fps) {
  scene::Scene s;
  scene::LedArraySpec a;
  a.id = "tx";
  a.world_position = Vec3(0, 0.3, 12);
  a.waveform = toggling_waveform(camera_fps);
  s.arrays.push_back(a);
  scene::NoiseSourceSpec lamp;
  lamp.category = scene::NoiseCategory::AcLighting;
  lamp.world_position = Vec3(-2.5, -1.0, 15);
  lamp.extent_w = lamp.extent_h = 14;
  lamp.intensity = 0.5;
  lamp.phase = 0.2;
  s.noise.push_back(lamp);
  scene::NoiseSourceSpec neon;
  neon.category = scene::NoiseCategory::NeonBallast;
  neon.shape = scene::NoiseShape::Rect;
  neon.frequency = 3.3e4;
  neon.world_position = Vec3(2.5, -1.2, 15);
  neon.extent_w = 80;
  neon.extent_h = 5;
  neon.intensity = 0.4;
  s.noise.push_back(neon);
  scene::NoiseSourceSpec screen;
  screen.category = scene::NoiseCategory::LedScreen;
  screen.shape = scene::NoiseShape::Rect;
  screen.frequency = 3.1e5;
  screen.world_position = Vec3(0.0, -2.0, 20);
  screen.extent_w = 120;
  screen.extent_h = 30;
  screen.intensity = 0.3;
  s.noise.push_back(screen);
  return s;
}

}  // namespace occ::harness
