#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hsi/classify.hpp"
#include "hsi/datamodel.hpp"
#include "hsi/metrics.hpp"
#include "hsi/sampling.hpp"
#include "hsi/synthgen.hpp"

namespace hsi::harness {

// ---------------------------------------------------------------------------
// Experiment configuration
// ---------------------------------------------------------------------------

struct FileDataset {
  std::filesystem::path cube;
  std::filesystem::path labels;
};

using Dataset = std::variant<synth::SceneConfig, FileDataset>;

struct RawSpectral {};
struct SpatialCoords {};
struct MeanFilterThenRaw {
  std::size_t window = 3;
};
struct GaussianThenRaw {
  double sigma = 1.0;
};
struct Dwt3d {};
struct Emp {
  std::size_t components = 3;
  std::size_t radius = 4;
};

using FeatureChoice = std::variant<RawSpectral, SpatialCoords, MeanFilterThenRaw, GaussianThenRaw, Dwt3d, Emp>;

struct Knn {
  std::size_t k = 1;
};
/// Cost is picked from `costs` by stratified cross-validation on the training pixels.
struct LinearSvm {
  std::vector<double> costs{0.01, 0.1, 1.0, 10.0};
  std::size_t epochs = 30;
  std::size_t folds = 5;
};
struct Forest {
  std::size_t trees = 100;
  std::size_t max_depth = 0;
};

using ClassifierChoice = std::variant<Knn, LinearSvm, Forest>;

struct ExperimentConfig {
  Dataset dataset = synth::SceneConfig{};
  std::vector<sampling::Strategy> strategies{sampling::Strategy::StratifiedRandom};
  std::vector<double> rates{0.05, 0.1, 0.25};
  std::vector<FeatureChoice> features{RawSpectral{}};
  ClassifierChoice classifier = LinearSvm{};
  std::size_t repetitions = 10;
  std::uint64_t master_seed = 0;
  std::filesystem::path output_dir;  ///< empty: nothing is written
  bool save_splits = false;
  bool save_maps = false;

  void validate() const;
};

/// Flat "key = value" text; '#' starts a comment. See README for the key list.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

std::string feature_name(const FeatureChoice& f);
std::string classifier_name(const ClassifierChoice& c);
FeatureChoice parse_feature(const std::string& text);
ClassifierChoice parse_classifier(const std::string& text);

/// Square window (odd side) that bounds every pixel a feature reads around its centre.
std::size_t effective_window(const FeatureChoice& f);

/// Seed of repetition r: derive_seed(master_seed, r).
std::uint64_t repetition_seed(std::uint64_t master_seed, std::size_t repetition);

// ---------------------------------------------------------------------------
// Running
// ---------------------------------------------------------------------------

struct ResultRow {
  sampling::Strategy strategy;
  double rate;
  std::string feature;
  std::string classifier;
  std::size_t repetition;
  std::uint64_t seed;
  std::optional<metrics::EvalReport> report;  ///< empty when the repetition failed
  double overlap_rate = 0.0;
  std::string error;
};

struct AggregateRow {
  sampling::Strategy strategy;
  double rate;
  std::string feature;
  std::string classifier;
  std::size_t failures = 0;
  std::optional<metrics::EvalReport> report;
  double overlap_mean = 0.0;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<AggregateRow> aggregates;
};

/// Loads or generates the scene, extracts features once over all labeled pixels of the
/// (optionally filtered) cube, then for every strategy × rate × repetition samples a split,
/// trains on the Train rows, scores the Test rows and records the overlap rate at the
/// feature's effective window. Writes results.csv and aggregate.csv when output_dir is set.
ExperimentResult run_experiment(const ExperimentConfig& config);

std::string results_csv(const ExperimentResult& result);
std::string aggregate_csv(const ExperimentResult& result);

// ---------------------------------------------------------------------------
// Maps
// ---------------------------------------------------------------------------

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Colour of class c is palette[c−1].
using Palette = std::vector<Rgb>;

Palette default_palette();

struct RgbImage {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<Rgb> pixels;
  std::vector<std::string> warnings;
};

/// Class 0 renders black. Classes beyond the palette get a colour hashed from the id and a warning.
RgbImage render_map(std::span<const ClassId> classes, std::size_t height, std::size_t width,
                    const Palette& palette = default_palette());

/// Binary PPM (P6).
void write_ppm(const RgbImage& image, const std::filesystem::path& path);

}  // namespace hsi::harness
