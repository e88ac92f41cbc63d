#pragma once

// Serial, direct-formula versions of the data-parallel kernels. They are slow on purpose:
// each one evaluates its definition literally so the optimized kernels can be checked
// against it in tests and timed against it in the benchmark.

#include <optional>

#include "hsi/datamodel.hpp"
#include "hsi/features.hpp"
#include "hsi/filters.hpp"
#include "hsi/plane.hpp"

namespace hsi::reference {

/// Direct M×N window average with edge replication.
Plane mean_filter(const Plane& plane, const filters::WindowSpec& window);

/// Direct 2-D convolution with the outer product of the normalized 1-D taps.
Plane gaussian_filter(const Plane& plane, const filters::GaussianSpec& spec);

/// Per-band direct filters.
HyperCube mean_filter(const HyperCube& cube, const filters::WindowSpec& window);
HyperCube gaussian_filter(const HyperCube& cube, const filters::GaussianSpec& spec);

/// Opening/closing as max-of-min (min-of-max) over pairs of element offsets on the
/// edge-replicated plane: open(p) = max_{b} min_{b'} f(p + b − b').
Plane morph_open(const Plane& plane, std::size_t radius);
Plane morph_close(const Plane& plane, std::size_t radius);

/// Scans each test pixel's window for a training pixel.
double overlap_rate(const SplitMask& split, std::size_t w);

/// Pearson correlation of two spectra from raw sums; nullopt if either is constant.
std::optional<double> pearson(std::span<const float> a, std::span<const float> b);

/// Mean Pearson correlation at one offset over all in-bounds pairs.
std::optional<double> mean_correlation(const HyperCube& cube, std::ptrdiff_t dy, std::ptrdiff_t dx);

}  // namespace hsi::reference
