#include "hsi/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <type_traits>

#include "hsi/error.hpp"
#include "hsi/rng.hpp"

namespace hsi::synth {
namespace {

constexpr std::uint64_t kSignatureStream = 1;
constexpr std::uint64_t kLayoutStream = 2;
constexpr std::uint64_t kNoiseStream = 3;
constexpr int kMaxSignatureAttempts = 100;

double distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

std::vector<ClassId> voronoi_layout(const SceneConfig& cfg, const VoronoiBlobs& v) {
  const std::size_t sites = v.seeds_per_class * cfg.classes;
  if (sites > cfg.height * cfg.width) {
    throw ConfigError("voronoi layout needs " + std::to_string(sites) + " distinct sites but image has " +
                      std::to_string(cfg.height * cfg.width) + " pixels");
  }
  Rng rng(derive_seed(cfg.rng_seed, kLayoutStream));
  std::vector<Pixel> site;
  std::vector<bool> taken(cfg.height * cfg.width, false);
  while (site.size() < sites) {
    const auto y = static_cast<std::size_t>(rng.below(cfg.height));
    const auto x = static_cast<std::size_t>(rng.below(cfg.width));
    if (taken[y * cfg.width + x]) continue;
    taken[y * cfg.width + x] = true;
    site.push_back({y, x});
  }
  std::vector<ClassId> labels(cfg.height * cfg.width);
  for (std::size_t y = 0; y < cfg.height; ++y) {
    for (std::size_t x = 0; x < cfg.width; ++x) {
      std::size_t best = 0;
      auto best_d = std::numeric_limits<std::int64_t>::max();
      for (std::size_t s = 0; s < sites; ++s) {
        const auto dy = static_cast<std::int64_t>(y) - static_cast<std::int64_t>(site[s].y);
        const auto dx = static_cast<std::int64_t>(x) - static_cast<std::int64_t>(site[s].x);
        const auto d = dy * dy + dx * dx;
        if (d < best_d) {
          best_d = d;
          best = s;
        }
      }
      labels[y * cfg.width + x] = static_cast<ClassId>(best % cfg.classes + 1);
    }
  }
  return labels;
}

std::vector<ClassId> grid_layout(const SceneConfig& cfg, const GridBlocks& g) {
  if (g.block == 0 || g.block > cfg.height || g.block > cfg.width) {
    throw ConfigError("grid block size " + std::to_string(g.block) + " does not fit a " + std::to_string(cfg.height) +
                      "x" + std::to_string(cfg.width) + " image");
  }
  const std::size_t super_cols = ((cfg.width + g.block - 1) / g.block + 1) / 2;
  std::vector<ClassId> labels(cfg.height * cfg.width);
  for (std::size_t y = 0; y < cfg.height; ++y) {
    for (std::size_t x = 0; x < cfg.width; ++x) {
      const std::size_t by = y / g.block;
      const std::size_t bx = x / g.block;
      const std::size_t parity = 2 * (by % 2) + bx % 2;
      const std::size_t super = (by / 2) * super_cols + bx / 2;
      labels[y * cfg.width + x] = static_cast<ClassId>((parity + 4 * super) % cfg.classes + 1);
    }
  }
  return labels;
}

}  // namespace

void SceneConfig::validate() const {
  if (height == 0 || width == 0 || bands == 0) throw InvalidArgument("scene dimensions must be positive");
  if (classes < 2) throw InvalidArgument("scene needs at least 2 classes");
  if (classes > 65535) throw InvalidArgument("at most 65535 classes");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) throw InvalidArgument("noise_sigma must be >= 0");
  if (!(signature_separation > 0.0) || !std::isfinite(signature_separation)) {
    throw InvalidArgument("signature_separation must be > 0");
  }
  if (const auto* v = std::get_if<VoronoiBlobs>(&layout); v && v->seeds_per_class == 0) {
    throw InvalidArgument("seeds_per_class must be >= 1");
  }
}

std::vector<std::vector<double>> class_signatures(const SceneConfig& config) {
  config.validate();
  Rng rng(derive_seed(config.rng_seed, kSignatureStream));
  for (int attempt = 0; attempt < kMaxSignatureAttempts; ++attempt) {
    std::vector<std::vector<double>> sig(config.classes, std::vector<double>(config.bands));
    for (auto& s : sig) {
      for (auto& v : s) v = rng.uniform();
    }
    double min_d = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < sig.size(); ++a) {
      for (std::size_t b = a + 1; b < sig.size(); ++b) min_d = std::min(min_d, distance(sig[a], sig[b]));
    }
    // Draws that nearly coincide cannot be rescaled sensibly; retry.
    if (!(min_d > 1e-9)) continue;
    if (min_d < config.signature_separation) {
      // Scale about the centroid; a small margin absorbs rounding in the distance check.
      const double scale = config.signature_separation / min_d * (1.0 + 1e-9);
      std::vector<double> centroid(config.bands, 0.0);
      for (const auto& s : sig) {
        for (std::size_t i = 0; i < config.bands; ++i) centroid[i] += s[i] / static_cast<double>(sig.size());
      }
      for (auto& s : sig) {
        for (std::size_t i = 0; i < config.bands; ++i) s[i] = centroid[i] + (s[i] - centroid[i]) * scale;
      }
    }
    return sig;
  }
  throw ConfigError("could not draw class signatures with separation " +
                    std::to_string(config.signature_separation) + " in " + std::to_string(config.bands) +
                    " bands after " + std::to_string(kMaxSignatureAttempts) + " attempts");
}

LabelMap generate_layout(const SceneConfig& config) {
  config.validate();
  auto labels = std::visit(
      [&](const auto& l) {
        if constexpr (std::is_same_v<std::decay_t<decltype(l)>, VoronoiBlobs>) {
          return voronoi_layout(config, l);
        } else {
          return grid_layout(config, l);
        }
      },
      config.layout);
  std::vector<bool> present(config.classes + 1, false);
  for (ClassId c : labels) present[c] = true;
  for (std::size_t c = 1; c <= config.classes; ++c) {
    if (!present[c]) {
      throw ConfigError("layout leaves class " + std::to_string(c) + " without pixels; enlarge the image");
    }
  }
  return LabelMap(config.height, config.width, std::move(labels));
}

Scene generate_scene(const SceneConfig& config) {
  auto labels = generate_layout(config);
  const auto sig = class_signatures(config);
  Rng noise(derive_seed(config.rng_seed, kNoiseStream));
  std::vector<float> values(config.height * config.width * config.bands);
  const auto lab = labels.labels();
  for (std::size_t i = 0; i < lab.size(); ++i) {
    const auto& s = sig[lab[i] - 1];
    for (std::size_t b = 0; b < config.bands; ++b) {
      double v = s[b];
      if (config.noise_sigma > 0.0) v += config.noise_sigma * noise.normal();
      values[i * config.bands + b] = static_cast<float>(v);
    }
  }
  return {HyperCube(config.height, config.width, config.bands, std::move(values)), std::move(labels)};
}

}  // namespace hsi::synth
