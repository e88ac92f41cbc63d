#include <gtest/gtest.h>

#include <cmath>

#include "hsi/error.hpp"
#include "hsi/filters.hpp"
#include "hsi/synthgen.hpp"
#include "support.hpp"

using namespace hsi;
using namespace hsi::filters;

namespace {
double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= a.size();
  mb /= b.size();
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}
}  // namespace

TEST(MeanFilter, OneByOneIsIdentity) {
  const auto c = test::random_cube(1, 9, 7, 4);
  EXPECT_EQ(mean_filter(c, WindowSpec::square(1)), c);
}

TEST(MeanFilter, ConstantStaysConstant) {
  const auto c = HyperCube::filled(6, 5, 3, 5.0f);
  for (std::size_t w : {3, 5, 9}) EXPECT_EQ(mean_filter(c, WindowSpec::square(w)), c);
}

TEST(MeanFilter, CenterOfThreeByThree) {
  const Plane p(3, 3, std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9});
  const auto out = mean_filter(p, WindowSpec::square(3));
  EXPECT_DOUBLE_EQ(out(1, 1), 45.0 / 9.0);
  // corner with replication: rows {1,1,4}, cols {1,1,2} pattern
  const double corner = (1 + 1 + 2 + 1 + 1 + 2 + 4 + 4 + 5) / 9.0;
  EXPECT_DOUBLE_EQ(out(0, 0), corner);
}

TEST(MeanFilter, RectangularWindow) {
  Plane p(5, 5);
  p(2, 2) = 15.0;
  const auto out = mean_filter(p, WindowSpec{5, 3});
  EXPECT_DOUBLE_EQ(out(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(out(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(out(3, 4), 1.0);
}

TEST(MeanFilter, EvenWindowRejected) {
  const auto c = HyperCube::filled(3, 3, 1, 0.0f);
  EXPECT_THROW(mean_filter(c, WindowSpec::square(4)), InvalidArgument);
  EXPECT_THROW(mean_filter(c, WindowSpec{3, 0}), InvalidArgument);
}

TEST(MeanFilter, Linearity) {
  Rng rng(3);
  Plane p(12, 10);
  for (auto& v : p.data) v = rng.normal();
  Plane scaled = p;
  for (auto& v : scaled.data) v *= 3.5;
  const auto a = mean_filter(p, WindowSpec::square(5));
  const auto b = mean_filter(scaled, WindowSpec::square(5));
  for (std::size_t i = 0; i < a.data.size(); ++i) EXPECT_NEAR(b.data[i], 3.5 * a.data[i], 1e-6 * std::abs(b.data[i]) + 1e-12);
}

TEST(Gaussian, KernelNormalizedAndTruncated) {
  for (double s : {0.3, 0.5, 1.0, 2.2}) {
    const auto k = gaussian_kernel(GaussianSpec{s});
    const std::size_t r = static_cast<std::size_t>(std::ceil(3 * s));
    ASSERT_EQ(k.size(), 2 * r + 1);
    double sum = 0;
    for (double v : k) sum += v;
    EXPECT_NEAR(sum, 1.0, 1e-15);
    for (std::size_t i = 0; i < k.size(); ++i) EXPECT_DOUBLE_EQ(k[i], k[k.size() - 1 - i]);
  }
}

TEST(Gaussian, ConstantUnchanged) {
  const auto c = HyperCube::filled(7, 6, 2, 3.25f);
  EXPECT_EQ(gaussian_filter(c, {1.3}), c);
}

TEST(Gaussian, ImpulseCenterWeight) {
  Plane p(11, 11);
  p(5, 5) = 1.0;
  const auto out = gaussian_filter(p, {0.5});
  // independent kernel: exp(-i²/(2σ²)) over |i| ≤ ceil(1.5) = 2, renormalized
  double taps[5], sum = 0;
  for (int i = -2; i <= 2; ++i) sum += taps[i + 2] = std::exp(-i * i / 0.5);
  const double c = taps[2] / sum;
  EXPECT_NEAR(out(5, 5), c * c, 1e-15);
  EXPECT_NEAR(out(5, 6), c * taps[3] / sum, 1e-15);
}

TEST(Gaussian, SigmaRejected) {
  const auto c = HyperCube::filled(3, 3, 1, 0.0f);
  EXPECT_THROW(gaussian_filter(c, {0.0}), InvalidArgument);
  EXPECT_THROW(gaussian_filter(c, {-1.0}), InvalidArgument);
}

TEST(Gaussian, PreservesMeanOnPeriodicInterior) {
  // A zero-mean pattern padded by a wide constant border keeps the plane mean under the filter.
  Rng rng(8);
  Plane p(64, 64, 2.0);
  for (std::size_t y = 16; y < 48; ++y)
    for (std::size_t x = 16; x < 48; ++x) p(y, x) = 2.0 + rng.normal();
  double in = 0, out = 0;
  const auto f = gaussian_filter(p, {1.5});
  for (std::size_t i = 0; i < p.data.size(); ++i) {
    in += p.data[i];
    out += f.data[i];
  }
  EXPECT_NEAR(out, in, 1e-6 * std::abs(in));
}

TEST(Gaussian, SmallerSigmaStaysCloser) {
  synth::SceneConfig cfg;
  cfg.noise_sigma = 0.5;
  for (std::uint64_t s = 0; s < 5; ++s) {
    cfg.rng_seed = s;
    const auto scene = synth::generate_scene(cfg);
    const auto a = gaussian_filter(scene.cube, {0.7});
    const auto b = gaussian_filter(scene.cube, {2.0});
    for (std::size_t band = 0; band < 3; ++band) {
      const auto orig = scene.cube.plane(band);
      EXPECT_GT(correlation(orig, a.plane(band)), correlation(orig, b.plane(band)));
    }
  }
}
