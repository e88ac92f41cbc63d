#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "hsi/datamodel.hpp"
#include "hsi/rng.hpp"

namespace hsi::test {

/// Random label map: a few rectangles of random classes over background, then each class
/// 1..C forced to appear at least twice so every sampler precondition holds.
inline LabelMap random_labels(std::uint64_t seed, std::size_t h, std::size_t w, std::size_t classes) {
  Rng rng(seed);
  std::vector<ClassId> v(h * w, 0);
  const std::size_t rects = 3 + rng.below(6);
  for (std::size_t r = 0; r < rects; ++r) {
    const std::size_t y0 = rng.below(h), x0 = rng.below(w);
    const std::size_t y1 = std::min(h, y0 + 1 + rng.below(h / 2 + 1));
    const std::size_t x1 = std::min(w, x0 + 1 + rng.below(w / 2 + 1));
    const auto c = static_cast<ClassId>(1 + rng.below(classes));
    for (std::size_t y = y0; y < y1; ++y)
      for (std::size_t x = x0; x < x1; ++x) v[y * w + x] = c;
  }
  // scattered speckle keeps partitions irregular
  for (std::size_t i = 0; i < h * w / 10; ++i) v[rng.below(h * w)] = static_cast<ClassId>(rng.below(classes + 1));
  for (std::size_t c = 1; c <= classes; ++c) {
    for (int k = 0; k < 2; ++k) v[rng.below(h * w)] = static_cast<ClassId>(c);
  }
  // a class may have been overwritten by a later forced placement; top up to two pixels each
  for (std::size_t c = 1; c <= classes; ++c) {
    std::size_t n = 0;
    for (auto l : v) n += (l == c);
    for (std::size_t i = 0; n < 2 && i < v.size(); ++i) {
      std::size_t others = 0;
      for (auto l : v) others += (l == v[i]);
      if (v[i] == 0 || others > 2) {
        v[i] = static_cast<ClassId>(c);
        ++n;
      }
    }
  }
  return LabelMap(h, w, std::move(v));
}

inline HyperCube random_cube(std::uint64_t seed, std::size_t h, std::size_t w, std::size_t b, double sigma = 1.0) {
  Rng rng(seed);
  std::vector<float> v(h * w * b);
  for (auto& x : v) x = static_cast<float>(sigma * rng.normal());
  return HyperCube(h, w, b, std::move(v));
}

/// Explicit 8-neighbour flood fill; returns the number of components within `cells`.
inline std::size_t components_8(const std::set<Pixel>& cells) {
  std::set<Pixel> seen;
  std::size_t n = 0;
  for (const auto& start : cells) {
    if (seen.count(start)) continue;
    ++n;
    std::queue<Pixel> q;
    q.push(start);
    seen.insert(start);
    while (!q.empty()) {
      const Pixel p = q.front();
      q.pop();
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (!dy && !dx) continue;
          if ((dy < 0 && p.y == 0) || (dx < 0 && p.x == 0)) continue;
          const Pixel nb{p.y + dy, p.x + dx};
          if (cells.count(nb) && !seen.count(nb)) {
            seen.insert(nb);
            q.push(nb);
          }
        }
      }
    }
  }
  return n;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("hsi_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace hsi::test
