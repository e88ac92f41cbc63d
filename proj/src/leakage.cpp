#include "hsi/leakage.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "hsi/error.hpp"

namespace hsi::leakage {
namespace {

void check_window(std::size_t w) {
  if (w == 0 || w % 2 == 0) throw InvalidArgument("window size " + std::to_string(w) + " must be odd and positive");
}

// Unit-norm, mean-removed spectra; `ok` is false for constant spectra.
struct Standardized {
  std::vector<double> z;
  std::vector<bool> ok;
};

Standardized standardize(const HyperCube& cube) {
  const std::size_t b = cube.bands();
  Standardized s{std::vector<double>(cube.values().size()), std::vector<bool>(cube.pixels())};
  for (std::size_t i = 0; i < cube.pixels(); ++i) {
    const auto px = cube.values().subspan(i * b, b);
    double mean = 0.0;
    for (float v : px) mean += v;
    mean /= static_cast<double>(b);
    double ss = 0.0;
    for (float v : px) ss += (v - mean) * (v - mean);
    if (!(ss > 0.0)) continue;
    const double inv = 1.0 / std::sqrt(ss);
    for (std::size_t k = 0; k < b; ++k) s.z[i * b + k] = (px[k] - mean) * inv;
    s.ok[i] = true;
  }
  return s;
}

std::optional<double> offset_mean(const HyperCube& cube, const Standardized& s, std::ptrdiff_t dy, std::ptrdiff_t dx,
                                  std::size_t& pairs) {
  const auto h = static_cast<std::ptrdiff_t>(cube.height());
  const auto w = static_cast<std::ptrdiff_t>(cube.width());
  const std::size_t b = cube.bands();
  double sum = 0.0;
  pairs = 0;
  for (std::ptrdiff_t y = std::max<std::ptrdiff_t>(0, -dy); y < std::min(h, h - dy); ++y) {
    for (std::ptrdiff_t x = std::max<std::ptrdiff_t>(0, -dx); x < std::min(w, w - dx); ++x) {
      const auto a = static_cast<std::size_t>(y * w + x);
      const auto c = static_cast<std::size_t>((y + dy) * w + (x + dx));
      if (!s.ok[a] || !s.ok[c]) continue;
      double r = 1.0;
      if (a != c) {
        r = 0.0;
        for (std::size_t k = 0; k < b; ++k) r += s.z[a * b + k] * s.z[c * b + k];
      }
      sum += r;
      ++pairs;
    }
  }
  if (pairs == 0) return std::nullopt;
  return sum / static_cast<double>(pairs);
}

}  // namespace

double pairwise_window_overlap(std::size_t w, std::ptrdiff_t dy, std::ptrdiff_t dx) {
  check_window(w);
  const auto iw = static_cast<std::ptrdiff_t>(w);
  const auto oy = std::max<std::ptrdiff_t>(0, iw - std::abs(dy));
  const auto ox = std::max<std::ptrdiff_t>(0, iw - std::abs(dx));
  return static_cast<double>(oy * ox) / static_cast<double>(iw * iw);
}

std::vector<bool> coverage(const SplitMask& split, std::size_t w) {
  check_window(w);
  const std::size_t h = split.height(), wd = split.width();
  const auto r = static_cast<std::ptrdiff_t>((w - 1) / 2);
  // Summed-area table of training pixels.
  std::vector<std::size_t> sat((h + 1) * (wd + 1), 0);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < wd; ++x) {
      sat[(y + 1) * (wd + 1) + x + 1] = (split.at(y, x) == SplitState::Train ? 1 : 0) + sat[y * (wd + 1) + x + 1] +
                                        sat[(y + 1) * (wd + 1) + x] - sat[y * (wd + 1) + x];
    }
  }
  std::vector<char> covered(h * wd, 0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t y = 0; y < static_cast<std::ptrdiff_t>(h); ++y) {
    const auto y0 = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, y - r));
    const auto y1 = static_cast<std::size_t>(std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(h), y + r + 1));
    for (std::ptrdiff_t x = 0; x < static_cast<std::ptrdiff_t>(wd); ++x) {
      const auto x0 = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, x - r));
      const auto x1 = static_cast<std::size_t>(std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(wd), x + r + 1));
      const std::size_t n = sat[y1 * (wd + 1) + x1] + sat[y0 * (wd + 1) + x0] - sat[y0 * (wd + 1) + x1] -
                            sat[y1 * (wd + 1) + x0];
      covered[static_cast<std::size_t>(y) * wd + static_cast<std::size_t>(x)] = n > 0;
    }
  }
  return {covered.begin(), covered.end()};
}

double overlap_rate(const SplitMask& split, std::size_t w) {
  const std::size_t tests = split.count(SplitState::Test);
  if (tests == 0) throw DataError("split has no test pixels; overlap rate undefined");
  const auto cov = coverage(split, w);
  std::size_t hit = 0;
  for (std::size_t i = 0; i < cov.size(); ++i) hit += cov[i] && split.states()[i] == SplitState::Test;
  return static_cast<double>(hit) / static_cast<double>(tests);
}

OverlapCurve overlap_curve(const LabelMap& labels, sampling::Strategy strategy, const std::vector<double>& rates,
                           const std::vector<std::size_t>& windows, std::uint64_t seed) {
  OverlapCurve curve{windows, rates, {}};
  for (double rate : rates) {
    const auto split = sampling::make_split(labels, {rate, seed, strategy});
    std::vector<double> row;
    for (std::size_t w : windows) row.push_back(overlap_rate(split, w));
    curve.values.push_back(std::move(row));
  }
  return curve;
}

std::optional<double> mean_correlation(const HyperCube& cube, std::ptrdiff_t dy, std::ptrdiff_t dx,
                                       std::size_t* pairs) {
  const auto s = standardize(cube);
  std::size_t n = 0;
  auto r = offset_mean(cube, s, dy, dx, n);
  if (pairs) *pairs = n;
  return r;
}

CorrelationPatch correlation_patch(const HyperCube& cube, std::size_t radius) {
  if (radius == 0) throw InvalidArgument("correlation patch radius must be >= 1");
  const auto s = standardize(cube);
  const auto r = static_cast<std::ptrdiff_t>(radius);
  const auto side = 2 * r + 1;
  CorrelationPatch patch{radius, std::vector<std::optional<double>>(static_cast<std::size_t>(side * side)),
                         std::vector<std::size_t>(static_cast<std::size_t>(side * side))};
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < side * side; ++k) {
    const auto i = static_cast<std::size_t>(k);
    patch.rho[i] = offset_mean(cube, s, k / side - r, k % side - r, patch.pairs[i]);
  }
  return patch;
}

CorrelationCurve correlation_decay(const HyperCube& cube, Axis axis, std::size_t max_lag) {
  const std::size_t extent = axis == Axis::X ? cube.width() : cube.height();
  if (max_lag >= extent) {
    throw InvalidArgument("max lag " + std::to_string(max_lag) + " must be below the axis extent " +
                          std::to_string(extent));
  }
  const auto s = standardize(cube);
  CorrelationCurve curve;
  curve.rho.resize(max_lag + 1);
  curve.pairs.resize(max_lag + 1);
  for (std::size_t lag = 0; lag <= max_lag; ++lag) curve.lags.push_back(lag);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t l = 0; l <= static_cast<std::ptrdiff_t>(max_lag); ++l) {
    const auto i = static_cast<std::size_t>(l);
    curve.rho[i] = axis == Axis::X ? offset_mean(cube, s, 0, l, curve.pairs[i]) : offset_mean(cube, s, l, 0, curve.pairs[i]);
  }
  return curve;
}

}  // namespace hsi::leakage
