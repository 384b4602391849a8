#pragma once

// Transmitter region identification: frame differencing, thresholding,
// dilation, connected components and a disc-likeness filter.

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "occsim/core.hpp"
#include "occsim/image.hpp"

namespace occ::detect {

inline Frame differential_image(const Frame& f1, const Frame& f2) {
  require(f1.pixels.same_shape(f2.pixels), "differential_image: frame size mismatch");
  Frame out;
  out.pixels = Image(f1.width(), f1.height());
  out.timestamp = f2.timestamp;
  out.camera_id = f2.camera_id;
  auto& d = out.pixels.data();
  const auto& a = f1.pixels.data();
  const auto& b = f2.pixels.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::abs(a[i] - b[i]);
  return out;
}

/// Per-pixel maximum of the differentials of consecutive frames.
inline Frame accumulated_differential(std::span<const Frame> frames) {
  require(frames.size() >= 2, "accumulated_differential needs at least two frames");
  Frame acc = differential_image(frames[0], frames[1]);
  for (std::size_t i = 2; i < frames.size(); ++i) {
    const Frame d = differential_image(frames[i - 1], frames[i]);
    for (std::size_t k = 0; k < d.pixels.size(); ++k)
      acc.pixels.data()[k] = std::max(acc.pixels.data()[k], d.pixels.data()[k]);
  }
  return acc;
}

inline Mask binarize(const Image& img, double threshold) {
  require(threshold >= 0 && threshold <= 1, "binarize threshold must lie in [0, 1]");
  Mask m(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      if (img(x, y) >= threshold) m.set(x, y);
  return m;
}

/// Dilation by a disc structuring element {dx^2 + dy^2 <= r^2}.
inline Mask dilate(const Mask& m, int radius) {
  require(radius >= 0, "dilation radius must be non-negative");
  if (radius == 0) return m;
  std::vector<std::pair<int, int>> offsets;
  for (int dy = -radius; dy <= radius; ++dy)
    for (int dx = -radius; dx <= radius; ++dx)
      if (dx * dx + dy * dy <= radius * radius) offsets.emplace_back(dx, dy);
  Mask out(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) {
      if (!m.get(x, y)) continue;
      for (auto [dx, dy] : offsets)
        if (out.contains(x + dx, y + dy)) out.set(x + dx, y + dy);
    }
  return out;
}

struct Component {
  std::vector<std::pair<int, int>> pixels;  // (x, y)
  PixelRect bbox;
};

/// 8-connected components, ordered by first pixel in raster order.
inline std::vector<Component> connected_components(const Mask& m) {
  std::vector<Component> comps;
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(m.width()) * m.height(), 0);
  auto idx = [&](int x, int y) { return static_cast<std::size_t>(y) * m.width() + x; };
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) {
      if (!m.get(x, y) || seen[idx(x, y)]) continue;
      Component c;
      c.bbox = {x, y, x + 1, y + 1};
      stack.assign(1, {x, y});
      seen[idx(x, y)] = 1;
      while (!stack.empty()) {
        const auto [px, py] = stack.back();
        stack.pop_back();
        c.pixels.emplace_back(px, py);
        c.bbox = {std::min(c.bbox.x0, px), std::min(c.bbox.y0, py), std::max(c.bbox.x1, px + 1),
                  std::max(c.bbox.y1, py + 1)};
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = px + dx;
            const int ny = py + dy;
            if ((dx || dy) && m.contains(nx, ny) && m.get(nx, ny) && !seen[idx(nx, ny)]) {
              seen[idx(nx, ny)] = 1;
              stack.emplace_back(nx, ny);
            }
          }
      }
      std::sort(c.pixels.begin(), c.pixels.end(),
                [](auto a, auto b) { return std::tie(a.second, a.first) < std::tie(b.second, b.first); });
      comps.push_back(std::move(c));
    }
  return comps;
}

struct Circle {
  Vec2 center = Vec2::Zero();
  double radius = 0;
  bool contains(const Vec2& p, double eps = 1e-9) const { return (p - center).norm() <= radius + eps; }
};

namespace detail {

inline double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

inline std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Vec2> h(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= 0) --k;
    h[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

inline Circle circle_two(const Vec2& a, const Vec2& b) { return {(a + b) / 2, (a - b).norm() / 2}; }

inline Circle circle_three(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double d = 2 * (a.x() * (b.y() - c.y()) + b.x() * (c.y() - a.y()) + c.x() * (a.y() - b.y()));
  if (std::abs(d) < 1e-12) {  // collinear: widest pair
    Circle best = circle_two(a, b);
    for (const auto& cand : {circle_two(a, c), circle_two(b, c)})
      if (cand.radius > best.radius) best = cand;
    return best;
  }
  const double a2 = a.squaredNorm(), b2 = b.squaredNorm(), c2 = c.squaredNorm();
  const Vec2 o((a2 * (b.y() - c.y()) + b2 * (c.y() - a.y()) + c2 * (a.y() - b.y())) / d,
               (a2 * (c.x() - b.x()) + b2 * (a.x() - c.x()) + c2 * (b.x() - a.x())) / d);
  return {o, (a - o).norm()};
}

}  // namespace detail

/// Smallest circle enclosing every point (incremental Welzl on the hull).
inline Circle min_enclosing_circle(const std::vector<Vec2>& points) {
  require(!points.empty(), "min_enclosing_circle needs at least one point");
  const auto p = detail::convex_hull(points);
  Circle c{p[0], 0};
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (c.contains(p[i])) continue;
    c = {p[i], 0};
    for (std::size_t j = 0; j < i; ++j) {
      if (c.contains(p[j])) continue;
      c = detail::circle_two(p[i], p[j]);
      for (std::size_t k = 0; k < j; ++k)
        if (!c.contains(p[k])) c = detail::circle_three(p[i], p[j], p[k]);
    }
  }
  return c;
}

enum class RoiTag { Near, Far, TrafficLight, Rejected };

inline std::string_view to_string(RoiTag t) {
  switch (t) {
    case RoiTag::Near: return "near";
    case RoiTag::Far: return "far";
    case RoiTag::TrafficLight: return "traffic_light";
    case RoiTag::Rejected: return "rejected";
  }
  return "?";
}

struct RoI {
  int id = 0;
  PixelRect bbox;
  Vec2 centroid = Vec2::Zero();
  double area = 0;
  double circumcircle_fill = 0;
  RoiTag tag = RoiTag::Far;
};

struct ShapeFilterParams {
  double max_area_fraction = 0.05;  // of the image
  double min_fill = 0.45;
  double min_area = 6;              // px
  double near_area = 200;           // px
  std::optional<int> horizon_row;   // default: a quarter of the image height

  int horizon(int image_height) const { return horizon_row.value_or(image_height / 4); }
};

enum class Verdict { Accepted, TooLarge, NotRound, TooSmall };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Accepted: return "accepted";
    case Verdict::TooLarge: return "too_large";
    case Verdict::NotRound: return "not_round";
    case Verdict::TooSmall: return "too_small";
  }
  return "?";
}

struct RegionVerdict {
  RoI roi;
  Verdict verdict = Verdict::Accepted;
};

/// Region pixel count over the area of its circumcircle; the circle encloses
/// whole pixels, so half a pixel diagonal is added to the centre-based radius.
inline double circumcircle_fill(const Component& c) {
  std::vector<Vec2> pts;
  pts.reserve(c.pixels.size());
  for (auto [x, y] : c.pixels) pts.emplace_back(x, y);
  const double r = min_enclosing_circle(pts).radius + std::sqrt(0.5);
  return std::min(1.0, static_cast<double>(c.pixels.size()) / (kPi * r * r));
}

inline RoI describe(const Component& c, int id) {
  RoI roi;
  roi.id = id;
  roi.bbox = c.bbox;
  roi.area = static_cast<double>(c.pixels.size());
  Vec2 s = Vec2::Zero();
  for (auto [x, y] : c.pixels) s += Vec2(x, y);
  roi.centroid = s / roi.area;
  roi.circumcircle_fill = circumcircle_fill(c);
  return roi;
}

inline std::vector<RegionVerdict> evaluate_regions(const std::vector<Component>& regions, int image_width,
                                                   int image_height, const ShapeFilterParams& p = {}) {
  std::vector<RegionVerdict> out;
  const double image_area = static_cast<double>(image_width) * image_height;
  int id = 0;
  for (const auto& c : regions) {
    RegionVerdict v{describe(c, id++), Verdict::Accepted};
    if (v.roi.area > p.max_area_fraction * image_area) v.verdict = Verdict::TooLarge;
    else if (v.roi.area < p.min_area) v.verdict = Verdict::TooSmall;
    else if (v.roi.circumcircle_fill < p.min_fill) v.verdict = Verdict::NotRound;
    if (v.verdict != Verdict::Accepted) v.roi.tag = RoiTag::Rejected;
    else if (v.roi.centroid.y() < p.horizon(image_height)) v.roi.tag = RoiTag::TrafficLight;
    else v.roi.tag = v.roi.area >= p.near_area ? RoiTag::Near : RoiTag::Far;
    out.push_back(v);
  }
  return out;
}

/// Accepted regions only, renumbered from 0.
inline std::vector<RoI> shape_filter(const std::vector<Component>& regions, int image_width, int image_height,
                                     const ShapeFilterParams& p = {}) {
  std::vector<RoI> out;
  for (auto& v : evaluate_regions(regions, image_width, image_height, p))
    if (v.verdict == Verdict::Accepted) {
      v.roi.id = static_cast<int>(out.size());
      out.push_back(v.roi);
    }
  return out;
}

struct DetectParams {
  double threshold = 0.25;
  int dilate_radius = 2;
  ShapeFilterParams shape{};
};

inline std::vector<RoI> rois_from_differential(const Image& diff, const DetectParams& p = {}) {
  const Mask m = dilate(binarize(diff, p.threshold), p.dilate_radius);
  return shape_filter(connected_components(m), diff.width(), diff.height(), p.shape);
}

/// Modulated-transmitter regions from consecutive frames.
inline std::vector<RoI> detect_rois(std::span<const Frame> frames, const DetectParams& p = {}) {
  return rois_from_differential(accumulated_differential(frames).pixels, p);
}

/// Bright spots in a single frame (no differencing); centroids only need
/// the size floor, not the shape test.
inline std::vector<RoI> detect_spots(const Image& img, double threshold, int dilate_radius = 0,
                                     double min_area = 1) {
  const Mask m = dilate(binarize(img, threshold), dilate_radius);
  std::vector<RoI> out;
  for (const auto& c : connected_components(m)) {
    if (static_cast<double>(c.pixels.size()) < min_area) continue;
    out.push_back(describe(c, static_cast<int>(out.size())));
  }
  return out;
}

}  // namespace occ::detect
