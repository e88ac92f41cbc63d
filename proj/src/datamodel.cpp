#include "hsi/datamodel.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include "hsi/error.hpp"

namespace hsi {

HyperCube::HyperCube(std::size_t height, std::size_t width, std::size_t bands, std::vector<float> values)
    : height_(height), width_(width), bands_(bands), values_(std::move(values)) {
  if (height_ == 0 || width_ == 0 || bands_ == 0) {
    throw InvariantViolation("cube dimensions must be positive");
  }
  if (values_.size() != height_ * width_ * bands_) {
    throw InvariantViolation("cube payload has " + std::to_string(values_.size()) + " values, expected " +
                             std::to_string(height_ * width_ * bands_));
  }
  const auto bad = std::find_if(values_.begin(), values_.end(), [](float v) { return !std::isfinite(v); });
  if (bad != values_.end()) {
    throw InvariantViolation("cube contains a non-finite value at flat index " +
                             std::to_string(bad - values_.begin()));
  }
}

HyperCube HyperCube::filled(std::size_t height, std::size_t width, std::size_t bands, float value) {
  return HyperCube(height, width, bands, std::vector<float>(height * width * bands, value));
}

std::vector<double> HyperCube::plane(std::size_t band) const {
  std::vector<double> out(pixels());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = values_[i * bands_ + band];
  return out;
}

HyperCube cube_from_planes(std::size_t height, std::size_t width, std::span<const std::vector<double>> planes) {
  const std::size_t bands = planes.size();
  std::vector<float> values(height * width * bands);
  for (std::size_t b = 0; b < bands; ++b) {
    if (planes[b].size() != height * width) throw InvalidArgument("plane size mismatch");
    for (std::size_t i = 0; i < height * width; ++i) values[i * bands + b] = static_cast<float>(planes[b][i]);
  }
  return HyperCube(height, width, bands, std::move(values));
}

LabelMap::LabelMap(std::size_t height, std::size_t width, std::vector<ClassId> labels)
    : height_(height), width_(width), labels_(std::move(labels)) {
  if (height_ == 0 || width_ == 0) throw InvariantViolation("label map dimensions must be positive");
  if (labels_.size() != height_ * width_) throw InvariantViolation("label map size does not match H*W");
  std::vector<bool> seen;
  for (ClassId c : labels_) {
    if (c == 0) continue;
    if (c >= seen.size()) seen.resize(c + 1, false);
    seen[c] = true;
  }
  classes_ = seen.empty() ? 0 : seen.size() - 1;
  for (std::size_t c = 1; c <= classes_; ++c) {
    if (!seen[c]) {
      throw InvariantViolation("class ids are not contiguous: class " + std::to_string(c) + " missing below " +
                               std::to_string(classes_));
    }
  }
}

SplitMask::SplitMask(const LabelMap& labels, std::vector<SplitState> states, std::uint64_t seed)
    : height_(labels.height()), width_(labels.width()), states_(std::move(states)), seed_(seed) {
  if (states_.size() != height_ * width_) throw InvariantViolation("split size does not match label map");
  const auto lab = labels.labels();
  for (std::size_t i = 0; i < states_.size(); ++i) {
    const auto s = static_cast<std::uint8_t>(states_[i]);
    if (s > 2) throw InvariantViolation("invalid split state");
    if (lab[i] == 0 && states_[i] != SplitState::Excluded) {
      throw InvariantViolation("train/test state on unlabeled pixel (" + std::to_string(i / width_) + ", " +
                               std::to_string(i % width_) + ")");
    }
  }
}

std::vector<Pixel> SplitMask::pixels_in(SplitState state) const {
  std::vector<Pixel> out;
  for (std::size_t i = 0; i < states_.size(); ++i) {
    if (states_[i] == state) out.push_back({i / width_, i % width_});
  }
  return out;
}

std::size_t SplitMask::count(SplitState state) const noexcept {
  return static_cast<std::size_t>(std::count(states_.begin(), states_.end(), state));
}

FeatureSet::FeatureSet(std::size_t height, std::size_t width, std::size_t dim, std::vector<double> values,
                       std::vector<Pixel> coords)
    : height_(height), width_(width), dim_(dim), values_(std::move(values)), coords_(std::move(coords)) {
  if (dim_ == 0) throw InvariantViolation("feature dimension must be positive");
  if (values_.size() != coords_.size() * dim_) throw InvariantViolation("feature payload does not match count*dim");
  if (std::any_of(values_.begin(), values_.end(), [](double v) { return !std::isfinite(v); })) {
    throw InvariantViolation("feature set contains a non-finite value");
  }
  std::vector<bool> used(height_ * width_, false);
  for (const Pixel& p : coords_) {
    if (p.y >= height_ || p.x >= width_) throw InvariantViolation("feature coordinate out of bounds");
    auto slot = used[p.y * width_ + p.x];
    if (slot) throw InvariantViolation("duplicate feature coordinate");
    slot = true;
  }
}

FeatureSet FeatureSet::select(const SplitMask& split, SplitState state) const {
  if (split.height() != height_ || split.width() != width_) throw InvalidArgument("split/feature extent mismatch");
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if (split.at(coords_[i].y, coords_[i].x) == state) rows.push_back(i);
  }
  return subset(rows);
}

FeatureSet FeatureSet::subset(std::span<const std::size_t> rows) const {
  std::vector<double> values;
  values.reserve(rows.size() * dim_);
  std::vector<Pixel> coords;
  coords.reserve(rows.size());
  for (std::size_t r : rows) {
    if (r >= coords_.size()) throw std::out_of_range("feature row index");
    const auto src = row(r);
    values.insert(values.end(), src.begin(), src.end());
    coords.push_back(coords_[r]);
  }
  return FeatureSet(height_, width_, dim_, std::move(values), std::move(coords));
}

ConfusionMatrix::ConfusionMatrix(std::size_t classes) : classes_(classes), counts_(classes * classes, 0) {}

ConfusionMatrix::ConfusionMatrix(std::size_t classes, std::vector<std::uint64_t> counts)
    : classes_(classes), counts_(std::move(counts)) {
  if (counts_.size() != classes_ * classes_) throw InvariantViolation("confusion counts must be C*C");
}

void ConfusionMatrix::add(ClassId truth, ClassId pred) {
  if (truth == 0 || pred == 0 || truth > classes_ || pred > classes_) {
    throw InvalidArgument("class id outside 1.." + std::to_string(classes_));
  }
  ++counts_[(truth - 1) * classes_ + (pred - 1)];
}

std::uint64_t ConfusionMatrix::total() const noexcept {
  std::uint64_t t = 0;
  for (auto c : counts_) t += c;
  return t;
}

std::uint64_t ConfusionMatrix::row_total(ClassId truth) const noexcept {
  std::uint64_t t = 0;
  for (std::size_t p = 0; p < classes_; ++p) t += counts_[(truth - 1) * classes_ + p];
  return t;
}

std::uint64_t ConfusionMatrix::col_total(ClassId pred) const noexcept {
  std::uint64_t t = 0;
  for (std::size_t r = 0; r < classes_; ++r) t += counts_[r * classes_ + (pred - 1)];
  return t;
}

std::map<ClassId, std::size_t> class_counts(const LabelMap& labels) {
  std::map<ClassId, std::size_t> counts;
  for (ClassId c : labels.labels()) {
    if (c != 0) ++counts[c];
  }
  return counts;
}

std::vector<float> spectrum_at(const HyperCube& cube, std::ptrdiff_t y, std::ptrdiff_t x) {
  if (y < 0 || x < 0 || static_cast<std::size_t>(y) >= cube.height() || static_cast<std::size_t>(x) >= cube.width()) {
    throw std::out_of_range("pixel (" + std::to_string(y) + ", " + std::to_string(x) + ") outside " +
                            std::to_string(cube.height()) + "x" + std::to_string(cube.width()) + " cube");
  }
  const auto px = cube.pixel(static_cast<std::size_t>(y), static_cast<std::size_t>(x));
  return {px.begin(), px.end()};
}

std::vector<Pixel> labeled_pixels(const LabelMap& labels) {
  std::vector<Pixel> out;
  for (std::size_t y = 0; y < labels.height(); ++y) {
    for (std::size_t x = 0; x < labels.width(); ++x) {
      if (labels.at(y, x) != 0) out.push_back({y, x});
    }
  }
  return out;
}

}  // namespace hsi
