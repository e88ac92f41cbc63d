#include "hsi/filters.hpp"

#include <cmath>
#include <string>

#include "hsi/error.hpp"

namespace hsi::filters {
namespace {

// One separable pass with edge replication. `taps` has odd length 2R+1.
Plane convolve_rows(const Plane& in, const std::vector<double>& taps) {
  const auto r = static_cast<std::ptrdiff_t>(taps.size() / 2);
  Plane out(in.height, in.width);
  for (std::size_t y = 0; y < in.height; ++y) {
    for (std::size_t x = 0; x < in.width; ++x) {
      double s = 0.0;
      for (std::ptrdiff_t k = -r; k <= r; ++k) {
        s += taps[static_cast<std::size_t>(k + r)] * in.clamped(static_cast<std::ptrdiff_t>(y), static_cast<std::ptrdiff_t>(x) + k);
      }
      out(y, x) = s;
    }
  }
  return out;
}

Plane convolve_cols(const Plane& in, const std::vector<double>& taps) {
  const auto r = static_cast<std::ptrdiff_t>(taps.size() / 2);
  Plane out(in.height, in.width);
  for (std::size_t y = 0; y < in.height; ++y) {
    for (std::size_t x = 0; x < in.width; ++x) {
      double s = 0.0;
      for (std::ptrdiff_t k = -r; k <= r; ++k) {
        s += taps[static_cast<std::size_t>(k + r)] * in.clamped(static_cast<std::ptrdiff_t>(y) + k, static_cast<std::ptrdiff_t>(x));
      }
      out(y, x) = s;
    }
  }
  return out;
}

template <class PlaneOp>
HyperCube per_band(const HyperCube& cube, PlaneOp op) {
  const std::size_t bands = cube.bands();
  const std::size_t n = cube.pixels();
  std::vector<float> values(cube.values().size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(bands); ++b) {
    const auto band = static_cast<std::size_t>(b);
    const Plane out = op(Plane(cube.height(), cube.width(), cube.plane(band)));
    for (std::size_t i = 0; i < n; ++i) values[i * bands + band] = static_cast<float>(out.data[i]);
  }
  return HyperCube(cube.height(), cube.width(), bands, std::move(values));
}

}  // namespace

void WindowSpec::validate() const {
  if (width == 0 || height == 0 || width % 2 == 0 || height % 2 == 0) {
    throw InvalidArgument("window " + std::to_string(width) + "x" + std::to_string(height) +
                          " must have odd, positive sides");
  }
}

std::size_t GaussianSpec::truncation_radius() const { return static_cast<std::size_t>(std::ceil(3.0 * sigma)); }

void GaussianSpec::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("gaussian sigma must be > 0");
}

std::vector<double> gaussian_kernel(const GaussianSpec& spec) {
  spec.validate();
  const auto r = static_cast<std::ptrdiff_t>(spec.truncation_radius());
  std::vector<double> taps(static_cast<std::size_t>(2 * r + 1));
  double sum = 0.0;
  for (std::ptrdiff_t k = -r; k <= r; ++k) {
    const double v = std::exp(-static_cast<double>(k * k) / (2.0 * spec.sigma * spec.sigma));
    taps[static_cast<std::size_t>(k + r)] = v;
    sum += v;
  }
  for (auto& t : taps) t /= sum;
  return taps;
}

Plane mean_filter(const Plane& plane, const WindowSpec& window) {
  window.validate();
  const std::vector<double> row_taps(window.width, 1.0 / static_cast<double>(window.width));
  const std::vector<double> col_taps(window.height, 1.0 / static_cast<double>(window.height));
  return convolve_cols(convolve_rows(plane, row_taps), col_taps);
}

Plane gaussian_filter(const Plane& plane, const GaussianSpec& spec) {
  const auto taps = gaussian_kernel(spec);
  return convolve_cols(convolve_rows(plane, taps), taps);
}

HyperCube mean_filter(const HyperCube& cube, const WindowSpec& window) {
  window.validate();
  if (window.width == 1 && window.height == 1) return cube;
  return per_band(cube, [&](const Plane& p) { return mean_filter(p, window); });
}

HyperCube gaussian_filter(const HyperCube& cube, const GaussianSpec& spec) {
  spec.validate();
  return per_band(cube, [&](const Plane& p) { return gaussian_filter(p, spec); });
}

}  // namespace hsi::filters
