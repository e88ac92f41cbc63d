#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hsi/datamodel.hpp"
#include "hsi/sampling.hpp"

namespace hsi::leakage {

/// |A ∩ B| / w² for two w×w windows whose centres differ by (dy, dx).
double pairwise_window_overlap(std::size_t w, std::ptrdiff_t dy, std::ptrdiff_t dx);

/// Fraction of Test pixels within Chebyshev distance (w−1)/2 of at least one Train pixel.
double overlap_rate(const SplitMask& split, std::size_t w);

/// Per-pixel coverage mask behind overlap_rate (true = inside some training window).
std::vector<bool> coverage(const SplitMask& split, std::size_t w);

struct OverlapCurve {
  std::vector<std::size_t> window_sizes;
  std::vector<double> rates;
  std::vector<std::vector<double>> values;  ///< [rate][window]
};

/// One split per rate (same seed), evaluated at every window size.
OverlapCurve overlap_curve(const LabelMap& labels, sampling::Strategy strategy, const std::vector<double>& rates,
                           const std::vector<std::size_t>& windows, std::uint64_t seed);

struct CorrelationPatch {
  std::size_t radius = 0;
  /// Row-major (2r+1)² mean correlation; nullopt where no pixel pair was usable.
  std::vector<std::optional<double>> rho;
  std::vector<std::size_t> pairs;

  std::optional<double> at(std::ptrdiff_t dy, std::ptrdiff_t dx) const {
    const auto side = static_cast<std::ptrdiff_t>(2 * radius + 1);
    const auto r = static_cast<std::ptrdiff_t>(radius);
    return rho[static_cast<std::size_t>((dy + r) * side + dx + r)];
  }
};

/// Mean Pearson correlation (over the spectral axis) between each pixel and its neighbour at
/// every offset in the (2r+1)² patch. Pixels with a constant spectrum are left out.
CorrelationPatch correlation_patch(const HyperCube& cube, std::size_t radius);

enum class Axis { X, Y };

struct CorrelationCurve {
  std::vector<std::size_t> lags;  ///< 0..max_lag
  std::vector<std::optional<double>> rho;
  std::vector<std::size_t> pairs;
};

/// Mean correlation at lags 0..max_lag in the positive direction of `axis`.
CorrelationCurve correlation_decay(const HyperCube& cube, Axis axis, std::size_t max_lag);

/// Mean correlation at one offset; nullopt when no pair is usable.
std::optional<double> mean_correlation(const HyperCube& cube, std::ptrdiff_t dy, std::ptrdiff_t dx,
                                       std::size_t* pairs = nullptr);

}  // namespace hsi::leakage
