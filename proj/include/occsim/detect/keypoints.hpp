#pragma once

// Difference-of-Gaussians keypoints with gradient-orientation assignment and
// 4x4x8 gradient-histogram descriptors.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "occsim/core.hpp"
#include "occsim/image.hpp"

namespace occ::detect {

struct Keypoint {
  Vec2 position = Vec2::Zero();
  double scale = 1;        // sigma
  double orientation = 0;  // radians
  std::vector<double> descriptor;
  int level = 0;           // DoG index it was found in
  double response = 0;     // DoG value
};

inline std::vector<double> gaussian_kernel(double sigma) {
  require(sigma > 0, "gaussian sigma must be positive");
  const int r = static_cast<int>(std::ceil(4 * sigma));
  std::vector<double> k(2 * r + 1);
  double s = 0;
  for (int i = -r; i <= r; ++i) s += k[i + r] = std::exp(-0.5 * i * i / (sigma * sigma));
  for (auto& v : k) v /= s;
  return k;
}

/// Separable Gaussian blur with clamp-to-edge borders.
inline Image gaussian_blur(const Image& img, double sigma) {
  const auto k = gaussian_kernel(sigma);
  const int r = static_cast<int>(k.size() / 2);
  Image tmp(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      double s = 0;
      for (int i = -r; i <= r; ++i) s += k[i + r] * img.at_clamped(x + i, y);
      tmp(x, y) = s;
    }
  Image out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      double s = 0;
      for (int i = -r; i <= r; ++i) s += k[i + r] * tmp.at_clamped(x, y + i);
      out(x, y) = s;
    }
  return out;
}

struct ScaleSpace {
  std::vector<Image> levels;   // L(x, y, sigma_i)
  std::vector<double> sigmas;  // sigma_i = sigma0 * k^i
  double factor = 1;
};

/// Each level is blurred directly from the input at sigma0 * k^i.
inline ScaleSpace scale_space(const Image& image, double sigma0, double factor, int levels) {
  require(sigma0 > 0, "sigma0 must be positive");
  require(factor > 1, "scale factor must exceed 1");
  require(levels >= 3, "scale space needs at least three levels");
  ScaleSpace ss;
  ss.factor = factor;
  for (int i = 0; i < levels; ++i) {
    const double s = sigma0 * std::pow(factor, i);
    ss.sigmas.push_back(s);
    ss.levels.push_back(gaussian_blur(image, s));
  }
  return ss;
}

/// D_i = L_{i+1} - L_i, tagged with sigma_i.
inline std::vector<Image> dog(const ScaleSpace& ss) {
  std::vector<Image> out;
  for (std::size_t i = 0; i + 1 < ss.levels.size(); ++i) {
    Image d(ss.levels[i].width(), ss.levels[i].height());
    for (std::size_t k = 0; k < d.size(); ++k) d.data()[k] = ss.levels[i + 1].data()[k] - ss.levels[i].data()[k];
    out.push_back(std::move(d));
  }
  return out;
}

struct ExtremaParams {
  double contrast_abs = 1e-6;
  double contrast_rel = 0.25;     // fraction of the largest |D| over all maps
  bool cross_scale = false;       // 26-neighbour test instead of 8 in-plane
  bool edge_reject = true;
  double edge_ratio = 10;
  bool refine = true;
};

namespace detail {

inline bool strict_extremum(const std::vector<Image>& dog, std::size_t i, int x, int y, bool cross_scale) {
  const double v = dog[i](x, y);
  const bool is_max = v > 0;
  auto beats = [&](double n) { return is_max ? v > n : v < n; };
  const std::size_t lo = (cross_scale && i > 0) ? i - 1 : i;
  const std::size_t hi = (cross_scale && i + 1 < dog.size()) ? i + 1 : i;
  for (std::size_t l = lo; l <= hi; ++l)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        if (l == i && dx == 0 && dy == 0) continue;
        if (!beats(dog[l](x + dx, y + dy))) return false;
      }
  return true;
}

inline bool passes_edge_test(const Image& d, int x, int y, double r) {
  const double dxx = d(x + 1, y) + d(x - 1, y) - 2 * d(x, y);
  const double dyy = d(x, y + 1) + d(x, y - 1) - 2 * d(x, y);
  const double dxy = 0.25 * (d(x + 1, y + 1) - d(x + 1, y - 1) - d(x - 1, y + 1) + d(x - 1, y - 1));
  const double tr = dxx + dyy;
  const double det = dxx * dyy - dxy * dxy;
  if (det <= 0) return false;
  return tr * tr / det < (r + 1) * (r + 1) / r;
}

inline double parabola_offset(double m, double c, double p) {
  const double den = m - 2 * c + p;
  if (std::abs(den) < 1e-15) return 0;
  return std::clamp(0.5 * (m - p) / den, -0.5, 0.5);
}

}  // namespace detail

/// Strict extrema of each DoG map. In the in-plane mode a blob produces an
/// extremum at every level; only the level with the largest |D| is kept.
inline std::vector<Keypoint> find_extrema(const std::vector<Image>& dog_maps, const std::vector<double>& sigmas,
                                          const ExtremaParams& p = {}) {
  require(!dog_maps.empty(), "find_extrema needs at least one DoG map");
  require(sigmas.size() >= dog_maps.size(), "one sigma per DoG map");
  double peak = 0;
  for (const auto& d : dog_maps)
    for (double v : d.data()) peak = std::max(peak, std::abs(v));
  const double threshold = std::max(p.contrast_abs, p.contrast_rel * peak);
  if (!(peak > p.contrast_abs)) return {};

  std::map<std::pair<int, int>, Keypoint> by_pixel;  // (y, x) keeps raster order
  std::vector<Keypoint> cross;
  for (std::size_t i = 0; i < dog_maps.size(); ++i) {
    const Image& d = dog_maps[i];
    for (int y = 1; y + 1 < d.height(); ++y)
      for (int x = 1; x + 1 < d.width(); ++x) {
        const double v = d(x, y);
        if (std::abs(v) < threshold) continue;
        if (!detail::strict_extremum(dog_maps, i, x, y, p.cross_scale)) continue;
        if (p.edge_reject && !detail::passes_edge_test(d, x, y, p.edge_ratio)) continue;
        Keypoint kp;
        kp.position = Vec2(x, y);
        kp.level = static_cast<int>(i);
        kp.response = v;
        kp.scale = sigmas[i];
        if (p.cross_scale) {
          cross.push_back(kp);
          continue;
        }
        auto [it, inserted] = by_pixel.try_emplace({y, x}, kp);
        if (!inserted && std::abs(v) > std::abs(it->second.response)) it->second = kp;
      }
  }
  std::vector<Keypoint> out;
  if (p.cross_scale) out = std::move(cross);
  else
    for (auto& [_, kp] : by_pixel) out.push_back(kp);

  if (p.refine) {
    for (auto& kp : out) {
      const Image& d = dog_maps[static_cast<std::size_t>(kp.level)];
      const int x = static_cast<int>(kp.position.x());
      const int y = static_cast<int>(kp.position.y());
      kp.position += Vec2(detail::parabola_offset(d(x - 1, y), d(x, y), d(x + 1, y)),
                          detail::parabola_offset(d(x, y - 1), d(x, y), d(x, y + 1)));
      const auto l = static_cast<std::size_t>(kp.level);
      if (l > 0 && l + 1 < dog_maps.size() && sigmas.size() > l + 1) {
        const double off = detail::parabola_offset(std::abs(dog_maps[l - 1](x, y)), std::abs(d(x, y)),
                                                   std::abs(dog_maps[l + 1](x, y)));
        kp.scale = sigmas[l] * std::pow(sigmas[l + 1] / sigmas[l], off);
      }
    }
  }
  return out;
}

/// Convenience: scale space, DoG and extrema in one call.
inline std::vector<Keypoint> detect_keypoints(const Image& image, double sigma0 = 1.6, double factor = std::sqrt(2.0),
                                              int levels = 6, const ExtremaParams& p = {}) {
  const auto ss = scale_space(image, sigma0, factor, levels);
  return find_extrema(dog(ss), ss.sigmas, p);
}

namespace detail {

inline Vec2 gradient(const Image& img, int x, int y) {
  return {0.5 * (img.at_clamped(x + 1, y) - img.at_clamped(x - 1, y)),
          0.5 * (img.at_clamped(x, y + 1) - img.at_clamped(x, y - 1))};
}

}  // namespace detail

struct OrientationParams {
  int bins = 36;
  double peak_ratio = 0.8;
  double window_factor = 1.5;  // Gaussian weight sigma = factor * scale
};

/// Gradient-orientation histogram around the keypoint.
inline std::vector<double> orientation_histogram(const Keypoint& kp, const Image& image,
                                                 const OrientationParams& p = {}) {
  std::vector<double> hist(static_cast<std::size_t>(p.bins), 0.0);
  const double sw = p.window_factor * kp.scale;
  const int r = static_cast<int>(std::ceil(3 * sw));
  const int cx = static_cast<int>(std::lround(kp.position.x()));
  const int cy = static_cast<int>(std::lround(kp.position.y()));
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx) {
      const int x = cx + dx;
      const int y = cy + dy;
      if (x < 1 || y < 1 || x + 1 >= image.width() || y + 1 >= image.height()) continue;
      const Vec2 g = detail::gradient(image, x, y);
      const double mag = g.norm();
      if (mag == 0) continue;
      const double w = std::exp(-0.5 * (dx * dx + dy * dy) / (sw * sw));
      double a = std::atan2(g.y(), g.x());
      if (a < 0) a += 2 * kPi;
      const int bin = static_cast<int>(std::floor(a / (2 * kPi) * p.bins)) % p.bins;
      hist[static_cast<std::size_t>(bin)] += w * mag;
    }
  return hist;
}

/// One keypoint per histogram bin with at least `peak_ratio` of the maximum.
inline std::vector<Keypoint> assign_orientation(const Keypoint& kp, const Image& image,
                                                const OrientationParams& p = {}) {
  require(kp.position.x() >= 1 && kp.position.y() >= 1 && kp.position.x() <= image.width() - 2 &&
              kp.position.y() <= image.height() - 2,
          "keypoint outside the image margin");
  const auto hist = orientation_histogram(kp, image, p);
  const double peak = *std::max_element(hist.begin(), hist.end());
  std::vector<Keypoint> out;
  if (!(peak > 0)) return out;
  const int n = p.bins;
  for (int b = 0; b < n; ++b) {
    const double c = hist[static_cast<std::size_t>(b)];
    if (c < p.peak_ratio * peak) continue;
    const double l = hist[static_cast<std::size_t>((b + n - 1) % n)];
    const double rgt = hist[static_cast<std::size_t>((b + 1) % n)];
    const double off = (c >= l && c >= rgt) ? detail::parabola_offset(l, c, rgt) : 0.0;
    Keypoint o = kp;
    double a = (b + 0.5 + off) * 2 * kPi / n;
    if (a >= kPi) a -= 2 * kPi;
    o.orientation = a;
    out.push_back(o);
  }
  return out;
}

struct DescriptorParams {
  int cells = 4;
  int orientation_bins = 8;
  double cell_factor = 3;  // cell width = factor * scale
  double clip = 0.2;
};

/// 128-vector of gradient histograms on a 4x4 grid in the keypoint frame.
inline std::vector<double> compute_descriptor(const Keypoint& kp, const Image& image,
                                              const DescriptorParams& p = {}) {
  const int nc = p.cells;
  const int nb = p.orientation_bins;
  std::vector<double> desc(static_cast<std::size_t>(nc * nc * nb), 0.0);
  const double cell = p.cell_factor * kp.scale;
  const double half = 0.5 * nc * cell;
  const int r = static_cast<int>(std::ceil(half * std::sqrt(2.0))) + 1;
  const double c = std::cos(kp.orientation), s = std::sin(kp.orientation);
  const int cx = static_cast<int>(std::lround(kp.position.x()));
  const int cy = static_cast<int>(std::lround(kp.position.y()));
  const double ws = 0.5 * nc * cell;
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx) {
      const double ox = cx + dx - kp.position.x();
      const double oy = cy + dy - kp.position.y();
      // Rotate into the keypoint frame.
      const double u = c * ox + s * oy;
      const double v = -s * ox + c * oy;
      const double fu = (u + half) / cell - 0.5;
      const double fv = (v + half) / cell - 0.5;
      if (fu <= -1 || fv <= -1 || fu >= nc || fv >= nc) continue;
      const Vec2 g = detail::gradient(image, cx + dx, cy + dy);
      const double mag = g.norm();
      if (mag == 0) continue;
      double a = std::atan2(g.y(), g.x()) - kp.orientation;
      a = std::fmod(a, 2 * kPi);
      if (a < 0) a += 2 * kPi;
      const double fo = a / (2 * kPi) * nb;
      const double w = mag * std::exp(-0.5 * (u * u + v * v) / (ws * ws));
      // Trilinear spread over neighbouring cells and orientation bins.
      const int u0 = static_cast<int>(std::floor(fu));
      const int v0 = static_cast<int>(std::floor(fv));
      const int o0 = static_cast<int>(std::floor(fo));
      const double du = fu - u0, dv = fv - v0, dOr = fo - o0;
      for (int iv = 0; iv < 2; ++iv) {
        const int vv = v0 + iv;
        if (vv < 0 || vv >= nc) continue;
        const double wv = iv ? dv : 1 - dv;
        for (int iu = 0; iu < 2; ++iu) {
          const int uu = u0 + iu;
          if (uu < 0 || uu >= nc) continue;
          const double wu = iu ? du : 1 - du;
          for (int io = 0; io < 2; ++io) {
            const int oo = (o0 + io) % nb;
            const double wo = io ? dOr : 1 - dOr;
            desc[static_cast<std::size_t>((vv * nc + uu) * nb + oo)] += w * wv * wu * wo;
          }
        }
      }
    }
  auto normalize = [&] {
    double n = 0;
    for (double d : desc) n += d * d;
    n = std::sqrt(n);
    if (n > 0)
      for (auto& d : desc) d /= n;
  };
  normalize();
  for (auto& d : desc) d = std::min(d, p.clip);
  normalize();
  return desc;
}

/// Full pipeline: extrema, orientations and descriptors on the level images.
inline std::vector<Keypoint> extract_features(const Image& image, double sigma0 = 1.6,
                                              double factor = std::sqrt(2.0), int levels = 6,
                                              const ExtremaParams& ep = {}) {
  const auto ss = scale_space(image, sigma0, factor, levels);
  std::vector<Keypoint> out;
  for (const auto& kp : find_extrema(dog(ss), ss.sigmas, ep)) {
    const Image& li = ss.levels[static_cast<std::size_t>(kp.level)];
    if (kp.position.x() < 1 || kp.position.y() < 1 || kp.position.x() > li.width() - 2 ||
        kp.position.y() > li.height() - 2)
      continue;
    for (auto o : assign_orientation(kp, li)) {
      o.descriptor = compute_descriptor(o, li);
      out.push_back(std::move(o));
    }
  }
  return out;
}

struct Match {
  std::size_t a = 0;
  std::size_t b = 0;
  double distance = 0;
};

/// Nearest neighbour in descriptor space, kept when it beats the second
/// nearest by the ratio.
inline std::vector<Match> match_descriptors(const std::vector<Keypoint>& a, const std::vector<Keypoint>& b,
                                            double ratio = 0.8) {
  require(!a.empty() && !b.empty(), "match_descriptors needs two non-empty sets");
  require(ratio > 0 && ratio <= 1, "ratio must lie in (0, 1]");
  std::vector<Match> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d1 = std::numeric_limits<double>::infinity(), d2 = d1;
    std::size_t best = 0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      require(a[i].descriptor.size() == b[j].descriptor.size(), "descriptor lengths differ");
      double d = 0;
      for (std::size_t k = 0; k < a[i].descriptor.size(); ++k) {
        const double e = a[i].descriptor[k] - b[j].descriptor[k];
        d += e * e;
      }
      d = std::sqrt(d);
      if (d < d1) {
        d2 = d1;
        d1 = d;
        best = j;
      } else if (d < d2) {
        d2 = d;
      }
    }
    if (b.size() == 1 || d1 < ratio * d2) out.push_back({i, best, d1});
  }
  return out;
}

}  // namespace occ::detect
