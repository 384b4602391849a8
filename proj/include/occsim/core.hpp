#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace occ {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

/// Bits are stored one per byte, each 0 or 1.
using Bits = std::vector<std::uint8_t>;

/// Default random stream. Every stochastic routine takes its stream by
/// reference; nothing in the library owns global random state.
using Rng = std::mt19937_64;

/// Independent stream for work item `index` under `master_seed`. Serial and
/// parallel runs that derive streams this way draw identical numbers.
inline Rng derive_stream(std::uint64_t master_seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                    static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32), 0x6f6363u};
  return Rng(seq);
}

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Violated precondition on a caller-supplied value.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Numeric procedure failed to converge.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Scenario or scene description failed validation.
class ConfigError : public Error {
 public:
  using Error::Error;
};

inline void require(bool ok, const std::string& message) {
  if (!ok) throw InvalidArgument(message);
}

inline constexpr double kPi = 3.14159265358979323846;

template <class Urbg>
Bits random_bits(std::size_t n, Urbg& rng) {
  std::bernoulli_distribution coin(0.5);
  Bits out(n);
  for (auto& b : out) b = coin(rng) ? 1 : 0;
  return out;
}

}  // namespace occ
