#pragma once

#include <cstddef>
#include <vector>

#include "hsi/datamodel.hpp"
#include "hsi/plane.hpp"

namespace hsi::filters {

/// Odd-sized averaging window (width M × height N).
struct WindowSpec {
  std::size_t width = 1;
  std::size_t height = 1;

  static WindowSpec square(std::size_t size) { return {size, size}; }
  void validate() const;
};

/// Gaussian smoothing; kernel support is truncated at ceil(3·sigma) and renormalized.
struct GaussianSpec {
  double sigma = 1.0;

  std::size_t truncation_radius() const;
  void validate() const;
};

/// Normalized 1-D taps for offsets −R..R.
std::vector<double> gaussian_kernel(const GaussianSpec& spec);

/// Box mean with edge replication, applied to one plane.
Plane mean_filter(const Plane& plane, const WindowSpec& window);
/// Separable convolution with the normalized Gaussian, edge replication.
Plane gaussian_filter(const Plane& plane, const GaussianSpec& spec);

/// Per-band mean filter; bands are processed in parallel.
HyperCube mean_filter(const HyperCube& cube, const WindowSpec& window);
HyperCube gaussian_filter(const HyperCube& cube, const GaussianSpec& spec);

}  // namespace hsi::filters
