#pragma once

#include <cstdint>
#include <map>
#include <string_view>
#include <vector>

#include "hsi/datamodel.hpp"

namespace hsi::sampling {

enum class Strategy { StratifiedRandom, ControlledRandom };

/// A maximal 8-connected set of same-class pixels.
struct Partition {
  ClassId class_id = 0;
  std::size_t id = 0;  ///< ordinal within the class, scanline order of first pixel
  std::vector<Pixel> pixels;
};

struct SamplingPlan {
  double rate = 0.1;
  std::uint64_t seed = 0;
  Strategy strategy = Strategy::StratifiedRandom;

  void validate() const;
};

/// floor(n·rate + 0.5): round half up.
std::size_t round_quota(std::size_t n, double rate);

/// Training pixels required for a class of n pixels: round_quota clamped to [1, n−1].
std::size_t class_quota(std::size_t n, double rate);

std::vector<Partition> connected_partitions(const LabelMap& labels, ClassId class_id);

SplitMask stratified_random_split(const LabelMap& labels, double rate, std::uint64_t seed);

/// Region-growing split: per 8-connected partition, grow one training region from a random
/// seed pixel until the partition quota is met; everything else labeled is Test.
SplitMask controlled_random_split(const LabelMap& labels, double rate, std::uint64_t seed);

SplitMask make_split(const LabelMap& labels, const SamplingPlan& plan);

struct ClassSplitCounts {
  std::size_t train = 0;
  std::size_t test = 0;
};

struct SplitSummary {
  std::map<ClassId, ClassSplitCounts> per_class;
  std::size_t train = 0;
  std::size_t test = 0;
  double achieved_rate = 0.0;  ///< train / (train + test); 0 when nothing is labeled
};

SplitSummary split_summary(const SplitMask& split, const LabelMap& labels);

const char* to_string(Strategy s) noexcept;
Strategy parse_strategy(std::string_view text);

}  // namespace hsi::sampling
