#pragma once

// Iterative closest point registration of planar point sets and a tracker
// that carries emitter positions through frames in which they are dark.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "occsim/core.hpp"
#include "occsim/detect/transform.hpp"

namespace occ::detect {

struct IcpParams {
  int max_iterations = 50;
  double tolerance = 1e-9;  // on the change of the weighted SSE
  /// Initial rotations (radians) tried about the centroid; best final SSE wins.
  std::vector<double> rotation_starts{0.0, 0.1745, -0.1745, 0.349, -0.349, 0.5236, -0.5236};
  /// Fits whose scale leaves this range are discarded (guards against collapse
  /// of all data onto one model point).
  double min_scale = 0.2;
  double max_scale = 5.0;
  /// Fraction of data points with the largest residuals left out of each fit
  /// (trimmed ICP); 0 uses every point.
  double trim_fraction = 0.0;
  /// Also start from the identity, which suits small inter-frame motion with
  /// only part of the model visible. Tried first, so it wins exact ties.
  bool identity_start = true;
};

struct IcpResult {
  Transform2D transform;  // maps data onto model
  double residual = 0;    // weighted sum of squared closest-point distances
  int iterations = 0;
  bool converged = false;
  std::vector<std::size_t> matches;  // model index for each data point
};

namespace detail {

inline std::size_t closest(const std::vector<Vec2>& model, const Vec2& p, double& d2) {
  std::size_t best = 0;
  d2 = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < model.size(); ++j) {
    const double d = (model[j] - p).squaredNorm();
    if (d < d2) {
      d2 = d;
      best = j;
    }
  }
  return best;
}

inline IcpResult icp_from(const std::vector<Vec2>& data, const std::vector<Vec2>& model,
                          const std::vector<double>& weights, Transform2D t, const IcpParams& p) {
  IcpResult r;
  const std::size_t n = data.size();
  const auto keep = std::max<std::size_t>(
      std::min<std::size_t>(n, 3), static_cast<std::size_t>(std::ceil((1 - p.trim_fraction) * static_cast<double>(n))));
  double prev = std::numeric_limits<double>::infinity();
  std::vector<Vec2> target(n);
  std::vector<double> d2(n), w(n);
  std::vector<std::size_t> order(n);
  r.matches.assign(n, 0);
  // Closest model point per datum; weights zero outside the kept fraction.
  auto correspond = [&](const Transform2D& tr) {
    for (std::size_t i = 0; i < n; ++i) {
      r.matches[i] = closest(model, tr.apply(data[i]), d2[i]);
      target[i] = model[r.matches[i]];
      w[i] = weights.empty() ? 1.0 : weights[i];
    }
    double sse = 0;
    if (keep < n) {
      for (std::size_t i = 0; i < n; ++i) order[i] = i;
      std::nth_element(order.begin(), order.begin() + static_cast<long>(keep), order.end(),
                       [&](auto a, auto b) { return d2[a] < d2[b]; });
      for (std::size_t k = keep; k < n; ++k) w[order[k]] = 0;
    }
    for (std::size_t i = 0; i < n; ++i) sse += w[i] * d2[i];
    return sse;
  };
  correspond(t);
  for (int it = 1; it <= p.max_iterations; ++it) {
    t = fit_similarity(data, target, w);
    const double sse = correspond(t);
    r.iterations = it;
    r.transform = t;
    r.residual = sse;
    if (std::abs(prev - sse) < p.tolerance) {
      r.converged = true;
      break;
    }
    prev = sse;
  }
  return r;
}

}  // namespace detail

/// Registers `data` onto `model`. `weights` is one non-negative weight per
/// data point (empty = uniform). The model must hold more points than the
/// plane has dimensions.
inline IcpResult icp_align(const std::vector<Vec2>& data, const std::vector<Vec2>& model,
                           const std::vector<double>& weights = {}, const IcpParams& p = {}) {
  if (model.empty()) throw InvalidArgument("icp_align: the model point set cannot be empty");
  require(!data.empty(), "icp_align: the data point set cannot be empty");
  require(weights.empty() || weights.size() == data.size(), "icp_align: weight count must match data count");
  require(model.size() > 2, "icp_align: model needs more points than the plane dimension");
  require(p.max_iterations > 0, "icp_align: max_iterations must be positive");
  require(p.trim_fraction >= 0 && p.trim_fraction < 1, "icp_align: trim fraction must lie in [0, 1)");

  Vec2 cd = Vec2::Zero(), cm = Vec2::Zero();
  for (const auto& v : data) cd += v;
  for (const auto& v : model) cm += v;
  cd /= static_cast<double>(data.size());
  cm /= static_cast<double>(model.size());

  IcpResult best;
  best.residual = std::numeric_limits<double>::infinity();
  std::vector<Transform2D> inits;
  if (p.identity_start) inits.push_back(Transform2D::identity());
  for (double a : p.rotation_starts.empty() ? std::vector<double>{0.0} : p.rotation_starts) {
    Transform2D init{1.0, a, Vec2::Zero()};
    init.translation = cm - init.linear() * cd;
    inits.push_back(init);
  }
  for (const auto& init : inits) {
    auto r = detail::icp_from(data, model, weights, init, p);
    if (r.transform.scale < p.min_scale || r.transform.scale > p.max_scale) continue;
    if (r.residual < best.residual - 1e-12) best = std::move(r);
  }
  if (!std::isfinite(best.residual)) throw ConvergenceError("icp_align: no admissible alignment", best.residual);
  return best;
}

/// Emitter positions carried across frames. Each update registers the current
/// detections onto the previous positions; inverting that transform predicts
/// where emitters that are currently dark must be.
class EmitterTracker {
 public:
  explicit EmitterTracker(std::vector<Vec2> initial, IcpParams params = {})
      : positions_(std::move(initial)), params_(std::move(params)) {
    require(positions_.size() > 2, "EmitterTracker needs at least three emitters");
  }

  const std::vector<Vec2>& positions() const { return positions_; }
  const Transform2D& last_motion() const { return last_; }

  /// Returns predicted positions in the current frame for every emitter.
  const std::vector<Vec2>& update(const std::vector<Vec2>& detections) {
    if (detections.empty()) return positions_;  // nothing to register against: hold
    const auto r = icp_align(detections, positions_, {}, params_);
    last_ = r.transform.inverse();  // previous -> current
    for (auto& p : positions_) p = last_.apply(p);
    return positions_;
  }

 private:
  std::vector<Vec2> positions_;
  IcpParams params_;
  Transform2D last_;
};

}  // namespace occ::detect
