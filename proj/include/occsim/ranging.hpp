#pragma once

// Stereo geometry: extrinsic composition, SAD block matching, depth,
// triangulation, array-separation ranging and re-projection error.
//
// Image coordinates for depth and triangulation are relative to the principal
// point; disparity d = x_l - x_r.

#include <algorithm>
#include <cmath>
#include <limits>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

#include "occsim/core.hpp"
#include "occsim/detect/regions.hpp"
#include "occsim/image.hpp"
#include "occsim/scene_io.hpp"

namespace occ::ranging {

struct StereoExtrinsics {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
};

inline bool is_rotation(const Mat3& r, double tol = 1e-9) {
  return (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() <= tol && std::abs(r.determinant() - 1) <= tol;
}

/// World-to-camera poses (R_i, T_i) of two cameras give the camera-2 to
/// camera-1 mapping R = R1 R2^T, T = T1 - R1 R2^T T2.
inline StereoExtrinsics compose_extrinsics(const Mat3& r1, const Vec3& t1, const Mat3& r2, const Vec3& t2) {
  require(is_rotation(r1), "R1 is not a proper orthonormal rotation");
  require(is_rotation(r2), "R2 is not a proper orthonormal rotation");
  StereoExtrinsics e;
  e.rotation = r1 * r2.transpose();
  e.translation = -e.rotation * t2 + t1;
  return e;
}

struct DisparityMap {
  Image values;  // px
  Mask valid;
  int window = 0;
  int max_disparity = 0;
};

struct SadParams {
  int window = 9;               // odd
  int max_disparity = 64;
  double uniqueness = 0.05;     // margin as a fraction of the window's left-image energy
  bool subpixel = true;
};

/// Block matching minimising the sum of absolute differences over a square
/// window. Ties go to the smaller disparity. A pixel is valid when the
/// runner-up (ignoring disparities adjacent to the best) costs more than the
/// best by the uniqueness margin.
inline DisparityMap sad_disparity(const Image& left, const Image& right, const SadParams& p = {}) {
  require(left.same_shape(right), "stereo pair must share dimensions");
  require(p.window > 0 && p.window % 2 == 1, "window must be odd and positive");
  require(p.window <= left.width() && p.window <= left.height(), "window larger than the image");
  require(p.max_disparity >= 0, "max disparity must be non-negative");
  const int w = left.width(), h = left.height(), hw = p.window / 2, nd = p.max_disparity + 1;

  DisparityMap out{Image(w, h), Mask(w, h), p.window, p.max_disparity};

  // Integral image of the left intensities for the uniqueness margin.
  std::vector<double> integral(static_cast<std::size_t>(w + 1) * (h + 1), 0.0);
  auto I = [&](int x, int y) -> double& { return integral[static_cast<std::size_t>(y) * (w + 1) + x]; };
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) I(x + 1, y + 1) = left(x, y) + I(x, y + 1) + I(x + 1, y) - I(x, y);

  // Column sums of |L - R| over the window rows, one array per disparity.
  std::vector<std::vector<double>> col(static_cast<std::size_t>(nd), std::vector<double>(w, 0.0));
  auto absdiff = [&](int x, int y, int d) { return x - d >= 0 ? std::abs(left(x, y) - right(x - d, y)) : 0.0; };
  for (int d = 0; d < nd; ++d)
    for (int y = 0; y < std::min(p.window, h); ++y)
      for (int x = 0; x < w; ++x) col[d][x] += absdiff(x, y, d);

  std::vector<double> cost(static_cast<std::size_t>(nd));
  for (int y = hw; y + hw < h; ++y) {
    if (y > hw) {
      for (int d = 0; d < nd; ++d)
        for (int x = 0; x < w; ++x) col[d][x] += absdiff(x, y + hw, d) - absdiff(x, y - hw - 1, d);
    }
    for (int x = hw; x + hw < w; ++x) {
      int best = -1, count = 0;
      for (int d = 0; d < nd; ++d) {
        if (x - hw - d < 0) break;  // window leaves the right image
        double s = 0;
        for (int i = x - hw; i <= x + hw; ++i) s += col[d][i];
        cost[d] = s;
        ++count;
        if (best < 0 || s < cost[best]) best = d;
      }
      if (best < 0) continue;
      double second = std::numeric_limits<double>::infinity();
      for (int d = 0; d < count; ++d)
        if (std::abs(d - best) > 1) second = std::min(second, cost[d]);
      const double energy = I(x + hw + 1, y + hw + 1) - I(x - hw, y + hw + 1) - I(x + hw + 1, y - hw) + I(x - hw, y - hw);
      // Without a runner-up the match cannot be called unique.
      if (std::isinf(second) && p.max_disparity > 0) continue;
      if (std::isfinite(second) && !(second - cost[best] > p.uniqueness * energy)) continue;
      double disp = best;
      if (p.subpixel && best > 0 && best + 1 < count) {
        // Equiangular (V-shaped) fit suits an L1 cost.
        const double cm = cost[best - 1], c0 = cost[best], cp = cost[best + 1];
        const double slope = std::max(cm, cp) - c0;
        if (slope > 0) disp += std::clamp(0.5 * (cm - cp) / slope, -0.5, 0.5);
      }
      out.values(x, y) = std::clamp(disp, 0.0, static_cast<double>(p.max_disparity));
      out.valid.set(x, y);
    }
  }
  return out;
}

/// Median of valid disparities inside a rectangle; nullopt when none.
inline std::optional<double> median_disparity(const DisparityMap& m, const PixelRect& r) {
  std::vector<double> v;
  const PixelRect c = r.clipped(m.values.width(), m.values.height());
  for (int y = c.y0; y < c.y1; ++y)
    for (int x = c.x0; x < c.x1; ++x)
      if (m.valid.get(x, y)) v.push_back(m.values(x, y));
  if (v.empty()) return std::nullopt;
  std::nth_element(v.begin(), v.begin() + static_cast<long>(v.size() / 2), v.end());
  return v[v.size() / 2];
}

/// z = f b / d.
inline double depth(double disparity_px, double focal_px, double baseline) {
  if (!(disparity_px > 0)) throw DomainError("depth undefined for non-positive disparity");
  require(focal_px > 0 && baseline > 0, "focal length and baseline must be positive");
  return focal_px * baseline / disparity_px;
}

inline Vec3 triangulate(double x_l, double x_r, double y_l, double focal_px, double baseline) {
  const double z = depth(x_l - x_r, focal_px, baseline);
  return {x_l * z / focal_px, y_l * z / focal_px, z};
}

/// D = (f / a) (d / n): array separation d seen as n pixels.
inline double inter_vehicle_distance(double focal_length, double pixel_size, double separation, double n_px) {
  if (!(n_px > 0)) throw DomainError("pixel separation must be positive");
  require(focal_length > 0 && pixel_size > 0 && separation > 0, "f, a and d must be positive");
  return focal_length / pixel_size * separation / n_px;
}

struct UnitPair {
  std::size_t left = 0;
  std::size_t right = 0;
  double separation_px = 0;
};

/// Pairs left/right LED units: same image row (within row_tolerance times the
/// blob height) and similar area; each RoI takes its nearest partner to the right.
inline std::vector<UnitPair> pair_units(const std::vector<detect::RoI>& rois, double row_tolerance = 0.5,
                                        double min_area_ratio = 0.5) {
  std::vector<std::size_t> order(rois.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return rois[a].centroid.x() < rois[b].centroid.x(); });
  std::vector<bool> used(rois.size(), false);
  std::vector<UnitPair> out;
  for (std::size_t oi = 0; oi < order.size(); ++oi) {
    const auto i = order[oi];
    if (used[i]) continue;
    for (std::size_t oj = oi + 1; oj < order.size(); ++oj) {
      const auto j = order[oj];
      if (used[j]) continue;
      const auto& a = rois[i];
      const auto& b = rois[j];
      const double tol = row_tolerance * std::max(a.bbox.height(), b.bbox.height());
      const double ratio = std::min(a.area, b.area) / std::max(a.area, b.area);
      if (std::abs(a.centroid.y() - b.centroid.y()) > tol || ratio < min_area_ratio) continue;
      used[i] = used[j] = true;
      out.push_back({i, j, b.centroid.x() - a.centroid.x()});
      break;
    }
  }
  return out;
}

struct Intrinsics {
  double focal_px = 1000;
  Vec2 principal_point = Vec2::Zero();

  Vec2 project(const Vec3& pc) const {
    if (!(pc.z() > 0)) throw DomainError("point behind camera");
    return principal_point + focal_px * Vec2(pc.x(), pc.y()) / pc.z();
  }
};

struct CalibrationView {
  Mat3 rotation = Mat3::Identity();  // world -> camera
  Vec3 translation = Vec3::Zero();
  std::vector<Vec3> world_points;
  std::vector<Vec2> observed;
};

/// Mean Euclidean distance between observations and projected world points, per view.
inline std::vector<double> reprojection_error(const Intrinsics& k, const std::vector<CalibrationView>& views) {
  require(!views.empty(), "reprojection_error needs at least one view");
  std::vector<double> out;
  for (const auto& v : views) {
    require(!v.world_points.empty(), "reprojection_error: empty view");
    require(v.world_points.size() == v.observed.size(), "world/observed point counts differ");
    double s = 0;
    for (std::size_t i = 0; i < v.world_points.size(); ++i)
      s += (k.project(v.rotation * v.world_points[i] + v.translation) - v.observed[i]).norm();
    out.push_back(s / static_cast<double>(v.world_points.size()));
  }
  return out;
}

/// Per-axis noise sigma implied by a mean Euclidean error (Rayleigh mean).
inline double sigma_from_mean_error(double mean_error) { return mean_error / std::sqrt(kPi / 2); }

inline void write_disparity(const std::string& pgm_path, const std::string& sidecar_path, const DisparityMap& m) {
  Image scaled(m.values.width(), m.values.height());
  const double scale = m.max_disparity > 0 ? 1.0 / m.max_disparity : 0.0;
  for (int y = 0; y < scaled.height(); ++y)
    for (int x = 0; x < scaled.width(); ++x) scaled(x, y) = m.valid.get(x, y) ? m.values(x, y) * scale : 0.0;
  io::write_pgm(pgm_path, scaled);
  std::ofstream os(sidecar_path);
  if (!os) throw Error("cannot open '" + sidecar_path + "' for writing");
  os << "# occsim disparity v1\n"
     << "width " << m.values.width() << "\nheight " << m.values.height() << "\nwindow " << m.window
     << "\nmax_disparity " << m.max_disparity << "\nvalid_pixels " << m.valid.count()
     << "\nscale max_disparity_to_255\n";
}

}  // namespace occ::ranging
