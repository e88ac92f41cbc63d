#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace hsi {

/// A single H×W real-valued image, row-major.
struct Plane {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> data;

  Plane() = default;
  Plane(std::size_t h, std::size_t w, double fill = 0.0) : height(h), width(w), data(h * w, fill) {}
  Plane(std::size_t h, std::size_t w, std::vector<double> values) : height(h), width(w), data(std::move(values)) {}

  double& operator()(std::size_t y, std::size_t x) noexcept { return data[y * width + x]; }
  double operator()(std::size_t y, std::size_t x) const noexcept { return data[y * width + x]; }

  /// Edge-replicated read.
  double clamped(std::ptrdiff_t y, std::ptrdiff_t x) const noexcept {
    const auto cy = std::clamp<std::ptrdiff_t>(y, 0, static_cast<std::ptrdiff_t>(height) - 1);
    const auto cx = std::clamp<std::ptrdiff_t>(x, 0, static_cast<std::ptrdiff_t>(width) - 1);
    return data[static_cast<std::size_t>(cy) * width + static_cast<std::size_t>(cx)];
  }

  friend bool operator==(const Plane&, const Plane&) = default;
};

}  // namespace hsi
