#pragma once

#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include "hsi/datamodel.hpp"

namespace hsi::synth {

/// Irregular regions: each class owns `seeds_per_class` Voronoi sites.
struct VoronoiBlobs {
  std::size_t seeds_per_class = 4;
};

/// Square blocks of side `block`. Block (by, bx) takes class ((2·(by mod 2) + bx mod 2) + 4·s) mod C + 1
/// where s indexes the enclosing 2×2 super-block, so with C a multiple of 4 no two same-class
/// blocks touch and every block is its own 8-connected partition.
struct GridBlocks {
  std::size_t block = 8;
};

using Layout = std::variant<VoronoiBlobs, GridBlocks>;

struct SceneConfig {
  std::size_t height = 64;
  std::size_t width = 64;
  std::size_t bands = 16;
  std::size_t classes = 4;
  Layout layout = VoronoiBlobs{};
  double signature_separation = 1.0;
  double noise_sigma = 0.1;
  std::uint64_t rng_seed = 0;

  /// Throws InvalidArgument when an invariant fails.
  void validate() const;
};

struct Scene {
  HyperCube cube;
  LabelMap labels;
};

/// C mean spectra with pairwise L2 distance ≥ signature_separation.
std::vector<std::vector<double>> class_signatures(const SceneConfig& config);

/// Class layout only (no spectra).
LabelMap generate_layout(const SceneConfig& config);

Scene generate_scene(const SceneConfig& config);

}  // namespace hsi::synth
