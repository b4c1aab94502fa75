// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The omnivq Authors

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace omnivq {

// Dense row-major 2-D array of reals. Used for luma planes, gradient maps
// and signed frame differences.
class Plane {
 public:
  Plane() = default;
  Plane(int width, int height, double fill = 0.0);
  Plane(int width, int height, std::vector<double> values);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  double operator()(int x, int y) const noexcept {
    return values_[static_cast<std::size_t>(y) * width_ + x];
  }
  double& operator()(int x, int y) noexcept {
    return values_[static_cast<std::size_t>(y) * width_ + x];
  }

  // Edge-replicated access; coordinates outside the plane are clamped.
  double clamped(int x, int y) const noexcept;

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> row(int y) const noexcept {
    return {values_.data() + static_cast<std::size_t>(y) * width_,
            static_cast<std::size_t>(width_)};
  }

  Plane transposed() const;

  friend bool operator==(const Plane&, const Plane&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> values_;
};

// Single-channel luma frame with a nominal bit depth. Samples are stored as
// reals and lie in [0, 2^bit_depth - 1].
class LumaFrame {
 public:
  LumaFrame() = default;
  LumaFrame(Plane plane, int bit_depth);
  LumaFrame(int width, int height, int bit_depth, double fill = 0.0);

  int width() const noexcept { return plane_.width(); }
  int height() const noexcept { return plane_.height(); }
  int bit_depth() const noexcept { return bit_depth_; }
  double max_value() const noexcept {
    return static_cast<double>((1 << bit_depth_) - 1);
  }

  const Plane& plane() const noexcept { return plane_; }
  double operator()(int x, int y) const noexcept { return plane_(x, y); }

  friend bool operator==(const LumaFrame&, const LumaFrame&) = default;

 private:
  Plane plane_;
  int bit_depth_ = 8;
};

// Signed pixel-wise difference a - b.
Plane difference(const Plane& a, const Plane& b);

}  // namespace omnivq
