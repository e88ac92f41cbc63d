#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "hsi/datamodel.hpp"
#include "hsi/plane.hpp"

namespace hsi::features {

// ---------------------------------------------------------------------------
// Spectral and spatial-coordinate features
// ---------------------------------------------------------------------------

/// D = B; each row is the pixel's spectrum.
FeatureSet raw_spectral(const HyperCube& cube, std::span<const Pixel> selection);

/// D = 2; rows are (y/(H−1), x/(W−1)), 0 along an axis of extent 1.
FeatureSet spatial_coords(const HyperCube& cube, std::span<const Pixel> selection);

// ---------------------------------------------------------------------------
// Undecimated Haar wavelet-packet features
// ---------------------------------------------------------------------------

enum class Wavelet { Haar };

/// Three-level packet tree per axis: 1 root + 2 + 4 + 8 = 15 nodes, each smoothed by a
/// 3×3 spatial mean before sampling. Axes are taken in the order x, y, spectral.
struct DwtSpec {
  std::size_t levels = 3;
  Wavelet wavelet = Wavelet::Haar;

  std::size_t nodes_per_axis() const noexcept { return (std::size_t{1} << (levels + 1)) - 1; }
  std::size_t min_extent() const noexcept { return std::size_t{1} << levels; }
  void validate() const;
};

/// One undecimated Haar analysis step at the given dilation:
///   low[i]  = (s[i] + s[i+d]) / 2,   high[i] = (s[i] − s[i+d]) / 2,
/// with the index clamped at the end, so low[i] + high[i] == s[i].
std::pair<std::vector<double>, std::vector<double>> haar_split(std::span<const double> signal, std::size_t dilation);

/// D = 45·B for the default spec (15 nodes × 3 axes × B bands).
FeatureSet dwt3d_features(const HyperCube& cube, std::span<const Pixel> selection, const DwtSpec& spec = {});

// ---------------------------------------------------------------------------
// Principal components
// ---------------------------------------------------------------------------

struct PcaModel {
  std::vector<double> mean;                     ///< per band
  std::vector<double> eigenvalues;              ///< all B, descending
  std::vector<std::vector<double>> components;  ///< B unit vectors, same order
  std::size_t rank = 0;                         ///< eigenvalues above 1e-10 · largest
};

/// Eigendecomposition of the B×B sample covariance over all pixels. Each component is
/// signed so its largest-magnitude loading is positive.
PcaModel pca_fit(const HyperCube& cube);

/// Centered scores on the first m components, one plane per component.
std::vector<Plane> pca_scores(const HyperCube& cube, const PcaModel& model, std::size_t m);

/// Score cube with m "bands".
HyperCube pca_project(const HyperCube& cube, std::size_t m);

// ---------------------------------------------------------------------------
// Morphology and extended morphological profiles
// ---------------------------------------------------------------------------

struct Offset {
  std::ptrdiff_t dy = 0;
  std::ptrdiff_t dx = 0;
  friend bool operator==(const Offset&, const Offset&) = default;
};

/// Disk structuring element of the given radius. Radius 1 is the 3×3 cross; larger
/// radii are Euclidean disks {dy²+dx² ≤ t} with the smallest t ≥ r² for which the
/// element is open with respect to the radius r−1 element, so openings shrink and
/// closings grow monotonically with the radius.
const std::vector<Offset>& disk_element(std::size_t radius);

Plane erode(const Plane& plane, std::span<const Offset> element);
Plane dilate(const Plane& plane, std::span<const Offset> element);

/// Erosion then dilation by disk_element(radius), edge replicated.
Plane morph_open(const Plane& plane, std::size_t radius);
/// Dilation then erosion by disk_element(radius), edge replicated.
Plane morph_close(const Plane& plane, std::size_t radius);

struct EmpSpec {
  std::size_t pca_components = 3;
  std::size_t max_se_radius = 4;
  bool stack_spectral = true;

  void validate(std::size_t bands) const;
  std::size_t dim(std::size_t bands) const noexcept {
    return pca_components * (2 * max_se_radius + 1) + (stack_spectral ? bands : 0);
  }
};

/// [o^(n), …, o^(1), plane, c^(1), …, c^(n)]
std::vector<Plane> morphological_profile(const Plane& plane, std::size_t max_radius);

/// m profiles stacked, then the raw spectrum: D = m·(2n+1) + B.
FeatureSet emp_features(const HyperCube& cube, std::span<const Pixel> selection, const EmpSpec& spec = {});

}  // namespace hsi::features
