#include "hsi/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hsi/error.hpp"
#include "hsi/rng.hpp"

namespace hsi::sampling {
namespace {

constexpr std::ptrdiff_t kNeighbors[8][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1}, {0, 1}, {1, -1}, {1, 0}, {1, 1}};

void check_labels(const LabelMap& labels, double rate) {
  if (!(rate > 0.0 && rate < 1.0)) throw InvalidArgument("sampling rate must lie in (0, 1)");
  for (const auto& [c, n] : class_counts(labels)) {
    if (n < 2) {
      throw DataError("class " + std::to_string(c) + " has " + std::to_string(n) +
                      " labeled pixel(s); at least 2 are needed to hold out a test pixel");
    }
  }
}

std::vector<SplitState> labeled_as_test(const LabelMap& labels) {
  std::vector<SplitState> states(labels.labels().size(), SplitState::Excluded);
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (labels.labels()[i] != 0) states[i] = SplitState::Test;
  }
  return states;
}

// Randomized breadth-first growth: whole rings are added in shuffled order until `target`
// pixels are taken. Every pixel of a ring touches the previous ring, which is complete, so
// the region stays 8-connected.
std::vector<Pixel> grow_region(const LabelMap& labels, const Partition& part, std::size_t target, Rng& rng) {
  std::vector<Pixel> region;
  if (target == 0) return region;
  const std::size_t w = labels.width();
  const std::size_t h = labels.height();
  std::vector<bool> visited(h * w, false);
  const Pixel seed = part.pixels[static_cast<std::size_t>(rng.below(part.pixels.size()))];
  visited[seed.y * w + seed.x] = true;
  region.push_back(seed);
  std::vector<Pixel> ring{seed};
  while (region.size() < target) {
    std::vector<Pixel> next;
    for (const Pixel& p : ring) {
      for (const auto& d : kNeighbors) {
        const auto ny = static_cast<std::ptrdiff_t>(p.y) + d[0];
        const auto nx = static_cast<std::ptrdiff_t>(p.x) + d[1];
        if (ny < 0 || nx < 0 || ny >= static_cast<std::ptrdiff_t>(h) || nx >= static_cast<std::ptrdiff_t>(w)) continue;
        const auto idx = static_cast<std::size_t>(ny) * w + static_cast<std::size_t>(nx);
        if (visited[idx] || labels.labels()[idx] != part.class_id) continue;
        visited[idx] = true;
        next.push_back({static_cast<std::size_t>(ny), static_cast<std::size_t>(nx)});
      }
    }
    if (next.empty()) break;  // unreachable for a connected partition with target <= size
    rng.shuffle(std::span<Pixel>(next));
    const std::size_t take = std::min(next.size(), target - region.size());
    region.insert(region.end(), next.begin(), next.begin() + static_cast<std::ptrdiff_t>(take));
    ring = std::move(next);
  }
  return region;
}

// Per-partition training quotas for one class, following the rounding and conservation rules.
std::vector<std::size_t> partition_quotas(const std::vector<Partition>& parts, std::size_t class_total, double rate,
                                          Rng& rng) {
  const std::size_t target = class_quota(class_total, rate);
  std::vector<std::size_t> quota(parts.size());
  std::vector<std::size_t> nonzero;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    quota[i] = round_quota(parts[i].pixels.size(), rate);
    if (quota[i] > 0) nonzero.push_back(i);
  }

  // More partitions want training pixels than the class can afford: sample partitions at random.
  if (nonzero.size() > target) {
    rng.shuffle(std::span<std::size_t>(nonzero));
    std::vector<std::size_t> kept(parts.size(), 0);
    std::size_t sum = 0;
    for (std::size_t i : nonzero) {
      if (sum >= target) break;
      kept[i] = quota[i];
      sum += quota[i];
    }
    quota = std::move(kept);
  }

  // Conservation: move the total to the class quota one pixel at a time, largest partitions first.
  std::vector<std::size_t> by_size(parts.size());
  std::iota(by_size.begin(), by_size.end(), std::size_t{0});
  std::stable_sort(by_size.begin(), by_size.end(),
                   [&](std::size_t a, std::size_t b) { return parts[a].pixels.size() > parts[b].pixels.size(); });
  std::size_t sum = std::accumulate(quota.begin(), quota.end(), std::size_t{0});
  while (sum < target) {
    for (std::size_t i : by_size) {
      if (sum == target) break;
      if (quota[i] < parts[i].pixels.size()) {
        ++quota[i];
        ++sum;
      }
    }
  }
  while (sum > target) {
    for (std::size_t i : by_size) {
      if (sum == target) break;
      if (quota[i] > 0) {
        --quota[i];
        --sum;
      }
    }
  }
  return quota;
}

}  // namespace

void SamplingPlan::validate() const {
  if (!(rate > 0.0 && rate < 1.0)) throw InvalidArgument("sampling rate must lie in (0, 1)");
}

std::size_t round_quota(std::size_t n, double rate) {
  return static_cast<std::size_t>(std::floor(static_cast<double>(n) * rate + 0.5));
}

std::size_t class_quota(std::size_t n, double rate) {
  if (n < 2) return 0;
  return std::clamp<std::size_t>(round_quota(n, rate), 1, n - 1);
}

std::vector<Partition> connected_partitions(const LabelMap& labels, ClassId class_id) {
  if (class_id == 0 || class_id > labels.num_classes()) {
    throw InvalidArgument("class " + std::to_string(class_id) + " not present in label map");
  }
  const std::size_t h = labels.height();
  const std::size_t w = labels.width();
  std::vector<bool> seen(h * w, false);
  std::vector<Partition> parts;
  for (std::size_t start = 0; start < h * w; ++start) {
    if (seen[start] || labels.labels()[start] != class_id) continue;
    Partition part{class_id, parts.size(), {}};
    std::vector<std::size_t> stack{start};
    seen[start] = true;
    while (!stack.empty()) {
      const std::size_t idx = stack.back();
      stack.pop_back();
      const Pixel p{idx / w, idx % w};
      part.pixels.push_back(p);
      for (const auto& d : kNeighbors) {
        const auto ny = static_cast<std::ptrdiff_t>(p.y) + d[0];
        const auto nx = static_cast<std::ptrdiff_t>(p.x) + d[1];
        if (ny < 0 || nx < 0 || ny >= static_cast<std::ptrdiff_t>(h) || nx >= static_cast<std::ptrdiff_t>(w)) continue;
        const auto n = static_cast<std::size_t>(ny) * w + static_cast<std::size_t>(nx);
        if (!seen[n] && labels.labels()[n] == class_id) {
          seen[n] = true;
          stack.push_back(n);
        }
      }
    }
    std::sort(part.pixels.begin(), part.pixels.end());
    parts.push_back(std::move(part));
  }
  return parts;
}

SplitMask stratified_random_split(const LabelMap& labels, double rate, std::uint64_t seed) {
  check_labels(labels, rate);
  auto states = labeled_as_test(labels);
  std::vector<std::vector<std::size_t>> members(labels.num_classes() + 1);
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (labels.labels()[i] != 0) members[labels.labels()[i]].push_back(i);
  }
  for (std::size_t c = 1; c < members.size(); ++c) {
    Rng rng(derive_seed(seed, c));
    auto& m = members[c];
    rng.shuffle(std::span<std::size_t>(m));
    const std::size_t quota = class_quota(m.size(), rate);
    for (std::size_t k = 0; k < quota; ++k) states[m[k]] = SplitState::Train;
  }
  return SplitMask(labels, std::move(states), seed);
}

SplitMask controlled_random_split(const LabelMap& labels, double rate, std::uint64_t seed) {
  check_labels(labels, rate);
  auto states = labeled_as_test(labels);
  const auto counts = class_counts(labels);
  for (const auto& [c, n] : counts) {
    Rng rng(derive_seed(seed, c));
    const auto parts = connected_partitions(labels, c);
    const auto quota = partition_quotas(parts, n, rate, rng);
    for (std::size_t i = 0; i < parts.size(); ++i) {
      for (const Pixel& p : grow_region(labels, parts[i], quota[i], rng)) {
        states[p.y * labels.width() + p.x] = SplitState::Train;
      }
    }
  }
  return SplitMask(labels, std::move(states), seed);
}

SplitMask make_split(const LabelMap& labels, const SamplingPlan& plan) {
  plan.validate();
  return plan.strategy == Strategy::StratifiedRandom ? stratified_random_split(labels, plan.rate, plan.seed)
                                                     : controlled_random_split(labels, plan.rate, plan.seed);
}

SplitSummary split_summary(const SplitMask& split, const LabelMap& labels) {
  if (split.height() != labels.height() || split.width() != labels.width()) {
    throw InvalidArgument("split and label map dimensions differ");
  }
  SplitSummary s;
  for (std::size_t i = 0; i < split.states().size(); ++i) {
    const ClassId c = labels.labels()[i];
    if (c == 0) continue;
    auto& cc = s.per_class[c];
    if (split.states()[i] == SplitState::Train) {
      ++cc.train;
      ++s.train;
    } else if (split.states()[i] == SplitState::Test) {
      ++cc.test;
      ++s.test;
    }
  }
  const std::size_t used = s.train + s.test;
  s.achieved_rate = used ? static_cast<double>(s.train) / static_cast<double>(used) : 0.0;
  return s;
}

const char* to_string(Strategy s) noexcept {
  return s == Strategy::StratifiedRandom ? "stratified" : "controlled";
}

Strategy parse_strategy(std::string_view text) {
  if (text == "stratified" || text == "random") return Strategy::StratifiedRandom;
  if (text == "controlled") return Strategy::ControlledRandom;
  throw InvalidArgument("unknown sampling strategy '" + std::string(text) + "'");
}

}  // namespace hsi::sampling
