#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "occsim/core.hpp"

namespace occ {

/// Row-major grid of doubles.
class Image {
 public:
  Image() = default;
  Image(int width, int height, double fill = 0.0)
      : width_(width), height_(height), data_(static_cast<std::size_t>(checked(width, height)), fill) {}

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(int x, int y) { return data_[index(x, y)]; }
  double operator()(int x, int y) const { return data_[index(x, y)]; }

  bool contains(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  /// Clamp-to-edge access.
  double at_clamped(int x, int y) const {
    x = std::clamp(x, 0, width_ - 1);
    y = std::clamp(y, 0, height_ - 1);
    return data_[index(x, y)];
  }

  /// Bilinear sample with clamp-to-edge.
  double sample(double x, double y) const {
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const double fx = x - x0;
    const double fy = y - y0;
    return (1 - fy) * ((1 - fx) * at_clamped(x0, y0) + fx * at_clamped(x0 + 1, y0)) +
           fy * ((1 - fx) * at_clamped(x0, y0 + 1) + fx * at_clamped(x0 + 1, y0 + 1));
  }

  std::vector<double>& data() noexcept { return data_; }
  const std::vector<double>& data() const noexcept { return data_; }

  bool same_shape(const Image& o) const noexcept { return width_ == o.width_ && height_ == o.height_; }

 private:
  static long checked(int w, int h) {
    require(w >= 0 && h >= 0, "image dimensions must be non-negative");
    return static_cast<long>(w) * h;
  }
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

/// Binary image.
class Mask {
 public:
  Mask() = default;
  Mask(int width, int height, bool fill = false)
      : width_(width), height_(height), data_(static_cast<std::size_t>(width) * height, fill ? 1 : 0) {}

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool contains(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  bool get(int x, int y) const { return data_[index(x, y)] != 0; }
  void set(int x, int y, bool v = true) { data_[index(x, y)] = v ? 1 : 0; }

  std::size_t count() const {
    return static_cast<std::size_t>(std::count(data_.begin(), data_.end(), std::uint8_t{1}));
  }

  const std::vector<std::uint8_t>& data() const noexcept { return data_; }

  bool operator==(const Mask& o) const = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Camera image with capture metadata. Intensities are normalized to [0, 1].
struct Frame {
  Image pixels;
  double timestamp = 0;
  std::string camera_id;

  int width() const noexcept { return pixels.width(); }
  int height() const noexcept { return pixels.height(); }
};

/// Axis-aligned pixel rectangle, inclusive of x0/y0 and exclusive of x1/y1.
struct PixelRect {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int width() const noexcept { return x1 - x0; }
  int height() const noexcept { return y1 - y0; }
  bool empty() const noexcept { return x1 <= x0 || y1 <= y0; }
  bool contains(double x, double y) const noexcept { return x >= x0 && x < x1 && y >= y0 && y < y1; }

  PixelRect expanded(int margin) const { return {x0 - margin, y0 - margin, x1 + margin, y1 + margin}; }
  PixelRect clipped(int width, int height) const {
    return {std::clamp(x0, 0, width), std::clamp(y0, 0, height), std::clamp(x1, 0, width),
            std::clamp(y1, 0, height)};
  }
  bool intersects(const PixelRect& o) const noexcept {
    return x0 < o.x1 && o.x0 < x1 && y0 < o.y1 && o.y0 < y1;
  }

  bool operator==(const PixelRect&) const = default;
};

inline double mean_over(const Image& img, const PixelRect& r) {
  const PixelRect c = r.clipped(img.width(), img.height());
  if (c.empty()) return 0.0;
  double sum = 0;
  for (int y = c.y0; y < c.y1; ++y)
    for (int x = c.x0; x < c.x1; ++x) sum += img(x, y);
  return sum / (static_cast<double>(c.width()) * c.height());
}

}  // namespace occ
