#include "hsi/error.hpp"
#include "hsi/features.hpp"

namespace hsi::features {
namespace {

void require_selection(std::span<const Pixel> selection) {
  if (selection.empty()) throw DataError("feature extraction needs a non-empty pixel selection");
}

}  // namespace

FeatureSet raw_spectral(const HyperCube& cube, std::span<const Pixel> selection) {
  require_selection(selection);
  const std::size_t b = cube.bands();
  std::vector<double> values(selection.size() * b);
  for (std::size_t i = 0; i < selection.size(); ++i) {
    const Pixel p = selection[i];
    if (p.y >= cube.height() || p.x >= cube.width()) throw InvalidArgument("selected pixel outside the cube");
    const auto px = cube.pixel(p.y, p.x);
    std::copy(px.begin(), px.end(), values.begin() + static_cast<std::ptrdiff_t>(i * b));
  }
  return FeatureSet(cube.height(), cube.width(), b, std::move(values), {selection.begin(), selection.end()});
}

FeatureSet spatial_coords(const HyperCube& cube, std::span<const Pixel> selection) {
  require_selection(selection);
  const double hy = cube.height() > 1 ? static_cast<double>(cube.height() - 1) : 1.0;
  const double wx = cube.width() > 1 ? static_cast<double>(cube.width() - 1) : 1.0;
  std::vector<double> values;
  values.reserve(selection.size() * 2);
  for (const Pixel& p : selection) {
    values.push_back(static_cast<double>(p.y) / hy);
    values.push_back(static_cast<double>(p.x) / wx);
  }
  return FeatureSet(cube.height(), cube.width(), 2, std::move(values), {selection.begin(), selection.end()});
}

}  // namespace hsi::features
