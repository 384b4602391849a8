#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "occsim/core.hpp"

namespace occ::numerics {

/// Gaussian tail probability Q(x) = P(N(0,1) > x).
inline double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

struct Integral {
  double value = 0;
  double error = 0;
};

/// Adaptive double-exponential quadrature over the open interval (a, b).
/// Endpoints are never evaluated, so integrable endpoint singularities are
/// fine. Throws ConvergenceError when the error estimate stays above
/// `tolerance` relative to the L1 norm of the integrand.
template <class F>
Integral integrate(F&& f, double a, double b, double tolerance = 1e-10) {
  boost::math::quadrature::tanh_sinh<double> rule(18);
  double error = 0;
  double l1 = 0;
  const double value = rule.integrate(f, a, b, tolerance, &error, &l1);
  if (!std::isfinite(value) || error > std::max(1e-6, 1e3 * tolerance) * std::max(l1, 1.0)) {
    throw ConvergenceError("quadrature did not converge (error estimate " +
                               std::to_string(error) + ")",
                           error);
  }
  return {value, error};
}

/// Wilson score interval at ~95% confidence.
struct Interval {
  double low = 0;
  double high = 0;
};

inline Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = 1.959963984540054) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double denom = 1 + z * z / n;
  const double centre = (p + z * z / (2 * n)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

}  // namespace occ::numerics
