#pragma once

// Plain PGM (P2) frames and the key-value scene description.
//
// Scene files are INI-style:
//
//   [camera]     focal_length pixel_size width height fps shutter=global|rolling
//                row_time exposure x y z
//   [vehicle.N]  x y z rows cols spacing radius separation intensity time_offset
//   [noise.N]    category=ac|neon|screen x y z intensity width height
//                shape=disc|rect frequency phase
//   [sky]        horizon top bottom
//   [occluder.N] x0 y0 x1 y1   (pixels, x1/y1 exclusive)

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "occsim/core.hpp"
#include "occsim/image.hpp"
#include "occsim/scene.hpp"

namespace occ::io {

inline void write_pgm(std::ostream& os, const Image& img, int maxval = 255) {
  require(maxval > 0 && maxval < 65536, "PGM maxval must be in [1, 65535]");
  os << "P2\n" << img.width() << ' ' << img.height() << '\n' << maxval << '\n';
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const long v = std::lround(std::clamp(img(x, y), 0.0, 1.0) * maxval);
      os << v << (x + 1 < img.width() ? ' ' : '\n');
    }
  }
}

inline void write_pgm(const std::string& path, const Image& img, int maxval = 255) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  write_pgm(os, img, maxval);
}

inline Image read_pgm(std::istream& is) {
  auto next_token = [&]() {
    std::string tok;
    while (is >> tok) {
      if (tok[0] == '#') {
        std::string rest;
        std::getline(is, rest);
        continue;
      }
      return tok;
    }
    throw InvalidArgument("truncated PGM stream");
  };
  if (next_token() != "P2") throw InvalidArgument("only plain PGM (P2) is supported");
  const int w = std::stoi(next_token());
  const int h = std::stoi(next_token());
  const int maxval = std::stoi(next_token());
  require(w >= 0 && h >= 0 && maxval > 0, "invalid PGM header");
  Image img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) img(x, y) = std::stod(next_token()) / maxval;
  return img;
}

inline Image read_pgm(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open '" + path + "'");
  return read_pgm(is);
}

inline Image mask_image(const Mask& m) {
  Image img(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) img(x, y) = m.get(x, y) ? 1.0 : 0.0;
  return img;
}

using Tree = boost::property_tree::ptree;

inline Tree read_ini(std::istream& is) {
  Tree t;
  try {
    boost::property_tree::read_ini(is, t);
  } catch (const boost::property_tree::ptree_error& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  }
  return t;
}

inline Tree read_ini_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open configuration '" + path + "'");
  return read_ini(is);
}

/// Typed lookup with a default; bad values raise ConfigError naming the key.
template <class T>
T get(const Tree& section, const std::string& key, const T& fallback, const std::string& where) {
  const auto node = section.get_child_optional(key);
  if (!node) return fallback;
  const auto v = node->get_value_optional<T>();
  if (!v) throw ConfigError("[" + where + "] " + key + ": cannot parse '" + node->data() + "'");
  return *v;
}

/// Sections whose name starts with `prefix.` in file order.
inline std::vector<std::pair<std::string, const Tree*>> sections_with_prefix(const Tree& root,
                                                                              const std::string& prefix) {
  std::vector<std::pair<std::string, const Tree*>> out;
  for (const auto& [name, child] : root)
    if (name.rfind(prefix + ".", 0) == 0) out.emplace_back(name, &child);
  return out;
}

template <class F>
auto validated(const std::string& where, F&& build) {
  try {
    return build();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError("[" + where + "] " + e.what());
  }
}

inline scene::CameraModel camera_from(const Tree& root, const std::string& section = "camera") {
  return validated(section, [&] {
    scene::CameraModel cam;
    const auto node = root.get_child_optional(section);
    if (!node) return cam;
    const Tree& s = *node;
    cam.id = get<std::string>(s, "id", cam.id, section);
    cam.focal_length = get(s, "focal_length", cam.focal_length, section);
    cam.pixel_size = get(s, "pixel_size", cam.pixel_size, section);
    cam.width = get(s, "width", cam.width, section);
    cam.height = get(s, "height", cam.height, section);
    cam.fps = get(s, "fps", cam.fps, section);
    const auto shutter = get<std::string>(s, "shutter", "global", section);
    if (shutter == "global") cam.shutter = scene::Shutter::Global;
    else if (shutter == "rolling") cam.shutter = scene::Shutter::Rolling;
    else throw ConfigError("[" + section + "] shutter must be 'global' or 'rolling'");
    cam.row_time = get(s, "row_time", cam.row_time, section);
    cam.exposure = get(s, "exposure", cam.exposure, section);
    cam.position = Vec3(get(s, "x", 0.0, section), get(s, "y", 0.0, section), get(s, "z", 0.0, section));
    cam.validate();
    return cam;
  });
}

inline scene::NoiseCategory noise_category_from(const std::string& s, const std::string& where) {
  if (s == "ac") return scene::NoiseCategory::AcLighting;
  if (s == "neon") return scene::NoiseCategory::NeonBallast;
  if (s == "screen") return scene::NoiseCategory::LedScreen;
  throw ConfigError("[" + where + "] category must be ac, neon or screen");
}

/// Scene geometry; waveforms are bound by the caller.
inline scene::Scene scene_from(const Tree& root) {
  scene::Scene sc;
  for (const auto& [name, sec] : sections_with_prefix(root, "vehicle")) {
    sc.arrays.push_back(validated(name, [&, &name = name, sec = sec] {
      scene::LedArraySpec a;
      a.id = get<std::string>(*sec, "id", name, name);
      a.world_position = Vec3(get(*sec, "x", 0.0, name), get(*sec, "y", 0.0, name), get(*sec, "z", 10.0, name));
      a.rows = get(*sec, "rows", a.rows, name);
      a.cols = get(*sec, "cols", a.cols, name);
      a.emitter_spacing = get(*sec, "spacing", a.emitter_spacing, name);
      a.emitter_radius = get(*sec, "radius", a.emitter_radius, name);
      a.left_right_separation = get(*sec, "separation", a.left_right_separation, name);
      a.intensity = get(*sec, "intensity", a.intensity, name);
      a.time_offset = get(*sec, "time_offset", a.time_offset, name);
      a.validate();
      return a;
    }));
  }
  for (const auto& [name, sec] : sections_with_prefix(root, "noise")) {
    sc.noise.push_back(validated(name, [&, &name = name, sec = sec] {
      scene::NoiseSourceSpec n;
      n.category = noise_category_from(get<std::string>(*sec, "category", "ac", name), name);
      n.frequency = get(*sec, "frequency", scene::default_frequency(n.category), name);
      n.world_position = Vec3(get(*sec, "x", 0.0, name), get(*sec, "y", 0.0, name), get(*sec, "z", 10.0, name));
      n.intensity = get(*sec, "intensity", n.intensity, name);
      n.extent_w = get(*sec, "width", n.extent_w, name);
      n.extent_h = get(*sec, "height", n.extent_h, name);
      const auto shape = get<std::string>(*sec, "shape", "disc", name);
      if (shape == "disc") n.shape = scene::NoiseShape::Disc;
      else if (shape == "rect") n.shape = scene::NoiseShape::Rect;
      else throw ConfigError("[" + name + "] shape must be disc or rect");
      n.phase = get(*sec, "phase", n.phase, name);
      n.validate();
      return n;
    }));
  }
  if (const auto sky = root.get_child_optional("sky")) {
    scene::SkySpec s;
    s.horizon_row = get(*sky, "horizon", s.horizon_row, "sky");
    s.top = get(*sky, "top", s.top, "sky");
    s.bottom = get(*sky, "bottom", s.bottom, "sky");
    sc.sky = s;
  }
  for (const auto& [name, sec] : sections_with_prefix(root, "occluder")) {
    sc.occluders.push_back({get(*sec, "x0", 0, name), get(*sec, "y0", 0, name), get(*sec, "x1", 0, name),
                            get(*sec, "y1", 0, name)});
  }
  return sc;
}

}  // namespace occ::io
