#include <algorithm>
#include <string>

#include "hsi/error.hpp"
#include "hsi/features.hpp"

namespace hsi::features {
namespace {

enum class Axis { X, Y, Spectral };

// Dense (y, x, band) volume of doubles.
struct Volume {
  std::size_t h, w, b;
  std::vector<double> v;

  double& at(std::size_t y, std::size_t x, std::size_t k) { return v[(y * w + x) * b + k]; }
  double at(std::size_t y, std::size_t x, std::size_t k) const { return v[(y * w + x) * b + k]; }
};

// Undecimated Haar step along one axis; returns (low, high).
std::pair<Volume, Volume> split(const Volume& in, Axis axis, std::size_t d) {
  Volume lo{in.h, in.w, in.b, std::vector<double>(in.v.size())};
  Volume hi{in.h, in.w, in.b, std::vector<double>(in.v.size())};
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t yy = 0; yy < static_cast<std::ptrdiff_t>(in.h); ++yy) {
    const auto y = static_cast<std::size_t>(yy);
    for (std::size_t x = 0; x < in.w; ++x) {
      for (std::size_t k = 0; k < in.b; ++k) {
        double next = 0.0;
        switch (axis) {
          case Axis::X: next = in.at(y, std::min(x + d, in.w - 1), k); break;
          case Axis::Y: next = in.at(std::min(y + d, in.h - 1), x, k); break;
          case Axis::Spectral: next = in.at(y, x, std::min(k + d, in.b - 1)); break;
        }
        const double s = in.at(y, x, k);
        lo.at(y, x, k) = 0.5 * (s + next);
        hi.at(y, x, k) = 0.5 * (s - next);
      }
    }
  }
  return {std::move(lo), std::move(hi)};
}

// Writes the 3×3 edge-replicated spatial mean of `node` at every selected pixel into
// columns [offset, offset + B) of `out`.
void sample_smoothed(const Volume& node, std::span<const Pixel> selection, std::size_t dim, std::size_t offset,
                     std::vector<double>& out) {
  const auto h = static_cast<std::ptrdiff_t>(node.h);
  const auto w = static_cast<std::ptrdiff_t>(node.w);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(selection.size()); ++i) {
    const Pixel p = selection[static_cast<std::size_t>(i)];
    double* row = out.data() + static_cast<std::size_t>(i) * dim + offset;
    for (std::size_t k = 0; k < node.b; ++k) row[k] = 0.0;
    for (std::ptrdiff_t dy = -1; dy <= 1; ++dy) {
      const auto y = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(p.y) + dy, 0, h - 1));
      for (std::ptrdiff_t dx = -1; dx <= 1; ++dx) {
        const auto x = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(p.x) + dx, 0, w - 1));
        for (std::size_t k = 0; k < node.b; ++k) row[k] += node.at(y, x, k);
      }
    }
    for (std::size_t k = 0; k < node.b; ++k) row[k] /= 9.0;
  }
}

// Depth-first walk of the packet tree; node n (breadth-first numbering, root 0) has
// children 2n+1 (low) and 2n+2 (high). Only the current root-to-leaf path is resident.
void walk(const Volume& node, std::size_t index, std::size_t level, std::size_t levels, Axis axis,
          std::span<const Pixel> selection, std::size_t dim, std::size_t axis_offset, std::vector<double>& out) {
  sample_smoothed(node, selection, dim, axis_offset + index * node.b, out);
  if (level == levels) return;
  auto [lo, hi] = split(node, axis, std::size_t{1} << level);
  walk(lo, 2 * index + 1, level + 1, levels, axis, selection, dim, axis_offset, out);
  walk(hi, 2 * index + 2, level + 1, levels, axis, selection, dim, axis_offset, out);
}

}  // namespace

void DwtSpec::validate() const {
  if (levels == 0 || levels > 8) throw InvalidArgument("dwt levels must lie in 1..8");
}

std::pair<std::vector<double>, std::vector<double>> haar_split(std::span<const double> signal, std::size_t dilation) {
  if (signal.empty() || dilation == 0) throw InvalidArgument("haar_split needs a signal and a positive dilation");
  std::vector<double> lo(signal.size()), hi(signal.size());
  for (std::size_t i = 0; i < signal.size(); ++i) {
    const double next = signal[std::min(i + dilation, signal.size() - 1)];
    lo[i] = 0.5 * (signal[i] + next);
    hi[i] = 0.5 * (signal[i] - next);
  }
  return {std::move(lo), std::move(hi)};
}

FeatureSet dwt3d_features(const HyperCube& cube, std::span<const Pixel> selection, const DwtSpec& spec) {
  spec.validate();
  const std::size_t min = spec.min_extent();
  if (cube.height() < min || cube.width() < min || cube.bands() < min) {
    throw DataError("3-D wavelet features need height, width and bands >= " + std::to_string(min) + ", got " +
                    std::to_string(cube.height()) + "x" + std::to_string(cube.width()) + "x" +
                    std::to_string(cube.bands()));
  }
  if (selection.empty()) throw DataError("feature extraction needs a non-empty pixel selection");
  for (const Pixel& p : selection) {
    if (p.y >= cube.height() || p.x >= cube.width()) throw InvalidArgument("selected pixel outside the cube");
  }
  const std::size_t per_axis = spec.nodes_per_axis() * cube.bands();
  const std::size_t dim = 3 * per_axis;
  std::vector<double> out(selection.size() * dim);
  const Volume root{cube.height(), cube.width(), cube.bands(), {cube.values().begin(), cube.values().end()}};
  const Axis axes[] = {Axis::X, Axis::Y, Axis::Spectral};
  for (std::size_t a = 0; a < 3; ++a) walk(root, 0, 0, spec.levels, axes[a], selection, dim, a * per_axis, out);
  return FeatureSet(cube.height(), cube.width(), dim, std::move(out), {selection.begin(), selection.end()});
}

}  // namespace hsi::features
