#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace hsi {

using ClassId = std::uint16_t;

struct Pixel {
  std::size_t y = 0;
  std::size_t x = 0;

  friend bool operator==(const Pixel&, const Pixel&) = default;
  friend auto operator<=>(const Pixel&, const Pixel&) = default;
};

/// H×W×B spectral responses stored row-major in (y, x, band) order.
/// Immutable once constructed; construction rejects non-finite values.
class HyperCube {
 public:
  HyperCube(std::size_t height, std::size_t width, std::size_t bands, std::vector<float> values);

  static HyperCube filled(std::size_t height, std::size_t width, std::size_t bands, float value);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t bands() const noexcept { return bands_; }
  std::size_t pixels() const noexcept { return height_ * width_; }

  float at(std::size_t y, std::size_t x, std::size_t band) const noexcept {
    return values_[(y * width_ + x) * bands_ + band];
  }
  std::span<const float> pixel(std::size_t y, std::size_t x) const noexcept {
    return {values_.data() + (y * width_ + x) * bands_, bands_};
  }
  std::span<const float> values() const noexcept { return values_; }

  /// Copy of one band as an H×W row-major plane.
  std::vector<double> plane(std::size_t band) const;

  friend bool operator==(const HyperCube&, const HyperCube&) = default;

 private:
  std::size_t height_;
  std::size_t width_;
  std::size_t bands_;
  std::vector<float> values_;
};

/// Builds a cube from B row-major H×W planes (band-sequential input).
HyperCube cube_from_planes(std::size_t height, std::size_t width, std::span<const std::vector<double>> planes);

/// Per-pixel class ids 1..C with 0 = unlabeled. Every class in 1..C occurs at least once.
class LabelMap {
 public:
  LabelMap(std::size_t height, std::size_t width, std::vector<ClassId> labels);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t num_classes() const noexcept { return classes_; }

  ClassId at(std::size_t y, std::size_t x) const noexcept { return labels_[y * width_ + x]; }
  std::span<const ClassId> labels() const noexcept { return labels_; }

  bool matches(const HyperCube& cube) const noexcept {
    return cube.height() == height_ && cube.width() == width_;
  }

  friend bool operator==(const LabelMap&, const LabelMap&) = default;

 private:
  std::size_t height_;
  std::size_t width_;
  std::size_t classes_ = 0;
  std::vector<ClassId> labels_;
};

enum class SplitState : std::uint8_t { Excluded = 0, Train = 1, Test = 2 };

/// Train/test designation per pixel. Train and Test only appear on labeled pixels.
class SplitMask {
 public:
  SplitMask(const LabelMap& labels, std::vector<SplitState> states, std::uint64_t seed);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::uint64_t seed() const noexcept { return seed_; }

  SplitState at(std::size_t y, std::size_t x) const noexcept { return states_[y * width_ + x]; }
  std::span<const SplitState> states() const noexcept { return states_; }

  std::vector<Pixel> pixels_in(SplitState state) const;
  std::size_t count(SplitState state) const noexcept;

  friend bool operator==(const SplitMask&, const SplitMask&) = default;

 private:
  std::size_t height_;
  std::size_t width_;
  std::vector<SplitState> states_;
  std::uint64_t seed_;
};

/// Per-pixel feature rows of a uniform dimension, each tagged with its source pixel.
class FeatureSet {
 public:
  FeatureSet(std::size_t height, std::size_t width, std::size_t dim, std::vector<double> values,
             std::vector<Pixel> coords);

  std::size_t count() const noexcept { return coords_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }

  std::span<const double> row(std::size_t i) const noexcept { return {values_.data() + i * dim_, dim_}; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<const Pixel> coords() const noexcept { return coords_; }

  /// Rows whose pixel carries the given split state, in this set's row order.
  FeatureSet select(const SplitMask& split, SplitState state) const;
  FeatureSet subset(std::span<const std::size_t> rows) const;

  friend bool operator==(const FeatureSet&, const FeatureSet&) = default;

 private:
  std::size_t height_;
  std::size_t width_;
  std::size_t dim_;
  std::vector<double> values_;
  std::vector<Pixel> coords_;
};

/// C×C counts, rows = truth, columns = prediction; classes are 1-based.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t classes);
  ConfusionMatrix(std::size_t classes, std::vector<std::uint64_t> counts);

  std::size_t classes() const noexcept { return classes_; }
  std::uint64_t at(ClassId truth, ClassId pred) const noexcept {
    return counts_[(truth - 1) * classes_ + (pred - 1)];
  }
  void add(ClassId truth, ClassId pred);
  std::uint64_t total() const noexcept;
  std::uint64_t row_total(ClassId truth) const noexcept;
  std::uint64_t col_total(ClassId pred) const noexcept;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::size_t classes_;
  std::vector<std::uint64_t> counts_;
};

std::map<ClassId, std::size_t> class_counts(const LabelMap& labels);

std::vector<float> spectrum_at(const HyperCube& cube, std::ptrdiff_t y, std::ptrdiff_t x);

/// All labeled pixels in scanline order.
std::vector<Pixel> labeled_pixels(const LabelMap& labels);

}  // namespace hsi
