#pragma once

// Planar similarity (scale-rotation-translation) and affine transforms.
// A similarity maps p to s R(alpha) p + t with R a proper rotation.

#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SVD>

#include "occsim/core.hpp"

namespace occ::detect {

inline double wrap_angle(double a) {
  a = std::remainder(a, 2 * kPi);
  return a <= -kPi ? a + 2 * kPi : a;
}

inline Mat2 rotation(double angle) {
  Mat2 r;
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

struct Transform2D {
  double scale = 1;
  double angle = 0;
  Vec2 translation = Vec2::Zero();

  static Transform2D identity() { return {}; }

  Mat2 linear() const { return scale * rotation(angle); }
  Vec2 apply(const Vec2& p) const { return linear() * p + translation; }

  Transform2D inverse() const {
    require(scale > 0, "transform scale must be positive");
    Transform2D inv;
    inv.scale = 1 / scale;
    inv.angle = wrap_angle(-angle);
    inv.translation = -(inv.linear() * translation);
    return inv;
  }

  bool approx(const Transform2D& o, double tol) const {
    return std::abs(scale - o.scale) <= tol && std::abs(wrap_angle(angle - o.angle)) <= tol &&
           (translation - o.translation).cwiseAbs().maxCoeff() <= tol;
  }
};

/// a o b: apply b first, then a.
inline Transform2D compose(const Transform2D& a, const Transform2D& b) {
  Transform2D c;
  c.scale = a.scale * b.scale;
  c.angle = wrap_angle(a.angle + b.angle);
  c.translation = a.linear() * b.translation + a.translation;
  return c;
}

/// cum[0] = H0, cum[i] = H_i o cum[i-1].
inline std::vector<Transform2D> cumulative_transform(const std::vector<Transform2D>& per_frame) {
  require(!per_frame.empty(), "cumulative_transform needs at least one transform");
  std::vector<Transform2D> cum;
  cum.reserve(per_frame.size());
  cum.push_back(per_frame.front());
  for (std::size_t i = 1; i < per_frame.size(); ++i) cum.push_back(compose(per_frame[i], cum.back()));
  return cum;
}

/// p' = A p + t with a general 2x2 A.
struct Affine {
  Mat2 linear = Mat2::Identity();
  Vec2 translation = Vec2::Zero();

  static Affine from(const Transform2D& t) { return {t.linear(), t.translation}; }
  Vec2 apply(const Vec2& p) const { return linear * p + translation; }
};

/// Closest similarity in Frobenius norm on the linear part; translation copied.
inline Transform2D fit_srt(const Affine& a) {
  const double p = 0.5 * (a.linear(0, 0) + a.linear(1, 1));
  const double q = 0.5 * (a.linear(1, 0) - a.linear(0, 1));
  const double s = std::hypot(p, q);
  if (!(s > 1e-15)) throw DomainError("fit_srt: linear part has no similarity component");
  return {s, std::atan2(q, p), a.translation};
}

/// Weighted least-squares similarity mapping src onto dst (Umeyama).
inline Transform2D fit_similarity(const std::vector<Vec2>& src, const std::vector<Vec2>& dst,
                                  const std::vector<double>& weights = {}) {
  require(src.size() == dst.size() && !src.empty(), "fit_similarity needs equal, non-empty point sets");
  require(weights.empty() || weights.size() == src.size(), "one weight per point");
  double wsum = 0;
  Vec2 ms = Vec2::Zero(), md = Vec2::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    require(w >= 0, "weights must be non-negative");
    wsum += w;
    ms += w * src[i];
    md += w * dst[i];
  }
  require(wsum > 0, "weights sum to zero");
  ms /= wsum;
  md /= wsum;
  Mat2 cov = Mat2::Zero();
  double var = 0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    const Vec2 a = src[i] - ms;
    cov += w * (dst[i] - md) * a.transpose();
    var += w * a.squaredNorm();
  }
  if (!(var > 0)) return {1.0, 0.0, md - ms};  // single location: translation only
  // For 2-D the optimal proper rotation follows from the skew/symmetric parts.
  const double c = cov(0, 0) + cov(1, 1);
  const double s = cov(1, 0) - cov(0, 1);
  const double angle = std::atan2(s, c);
  const double scale = std::hypot(c, s) / var;
  Transform2D t{scale, angle, Vec2::Zero()};
  t.translation = md - t.linear() * ms;
  return t;
}

/// Least-squares affine mapping src onto dst; needs 3 non-collinear points.
inline std::optional<Affine> fit_affine(const std::vector<Vec2>& src, const std::vector<Vec2>& dst) {
  require(src.size() == dst.size(), "fit_affine needs equal point sets");
  if (src.size() < 3) return std::nullopt;
  Eigen::MatrixXd A(src.size(), 3);
  Eigen::MatrixXd B(src.size(), 2);
  for (std::size_t i = 0; i < src.size(); ++i) {
    A.row(static_cast<Eigen::Index>(i)) << src[i].x(), src[i].y(), 1.0;
    B.row(static_cast<Eigen::Index>(i)) << dst[i].x(), dst[i].y();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (!(sv(2) > 1e-9 * std::max(1.0, sv(0)))) return std::nullopt;  // collinear / degenerate
  const Eigen::MatrixXd X = svd.solve(B);  // 3x2
  Affine a;
  a.linear << X(0, 0), X(1, 0), X(0, 1), X(1, 1);
  a.translation << X(2, 0), X(2, 1);
  return a;
}

}  // namespace occ::detect
