#include <gtest/gtest.h>

#include <cmath>

#include "hsi/error.hpp"
#include "hsi/metrics.hpp"
#include "support.hpp"

using namespace hsi;
using namespace hsi::metrics;

TEST(Confusion, Perfect) {
  const std::vector<ClassId> t{1, 2, 3, 3};
  const auto m = confusion(t, t);
  EXPECT_EQ(m.classes(), 3u);
  EXPECT_EQ(m.at(3, 3), 2u);
  EXPECT_EQ(m.at(1, 2), 0u);
}

TEST(Confusion, SinglePair) {
  const auto m = confusion(std::vector<ClassId>{2}, std::vector<ClassId>{1});
  EXPECT_EQ(m.at(1, 2), 1u);
  EXPECT_EQ(m.total(), 1u);
}

TEST(Confusion, MatchesTally) {
  Rng rng(1);
  std::vector<ClassId> p(500), t(500);
  std::uint64_t tally[5][5] = {};
  for (std::size_t i = 0; i < 500; ++i) {
    p[i] = static_cast<ClassId>(1 + rng.below(4));
    t[i] = static_cast<ClassId>(1 + rng.below(4));
    ++tally[t[i]][p[i]];
  }
  const auto m = confusion(p, t, 4);
  for (ClassId a = 1; a <= 4; ++a)
    for (ClassId b = 1; b <= 4; ++b) EXPECT_EQ(m.at(a, b), tally[a][b]);
}

TEST(Confusion, Errors) {
  EXPECT_THROW(confusion(std::vector<ClassId>{1}, std::vector<ClassId>{1, 2}), InvalidArgument);
  EXPECT_THROW(confusion(std::vector<ClassId>{1}, std::vector<ClassId>{0}), InvalidArgument);
}

TEST(Scores, Perfect) {
  const auto s = oa_aa_kappa(ConfusionMatrix(2, {50, 0, 0, 50}));
  EXPECT_EQ(s.oa, 1.0);
  EXPECT_EQ(s.aa, 1.0);
  EXPECT_EQ(s.kappa, 1.0);
}

TEST(Scores, Chance) {
  const auto s = oa_aa_kappa(ConfusionMatrix(2, {25, 25, 25, 25}));
  EXPECT_EQ(s.oa, 0.5);
  EXPECT_EQ(s.kappa, 0.0);
}

TEST(Scores, HandComputed) {
  const auto s = oa_aa_kappa(ConfusionMatrix(2, {40, 10, 20, 30}));
  const double po = 70.0 / 100.0;
  const double pe = (50.0 * 60.0 + 50.0 * 40.0) / (100.0 * 100.0);
  EXPECT_NEAR(s.oa, po, 1e-12);
  EXPECT_NEAR(s.aa, (40.0 / 50.0 + 30.0 / 50.0) / 2.0, 1e-12);
  EXPECT_NEAR(s.kappa, (po - pe) / (1.0 - pe), 1e-12);
  EXPECT_NEAR(s.kappa, 0.4, 1e-12);
}

TEST(Scores, DegenerateChance) {
  // every pixel truth 1 and predicted 1: p_e = 1, κ reported as 1
  EXPECT_EQ(oa_aa_kappa(ConfusionMatrix(2, {7, 0, 0, 0})).kappa, 1.0);
  EXPECT_THROW(oa_aa_kappa(ConfusionMatrix(2, {0, 0, 0, 0})), DataError);
}

TEST(Scores, AbsentClassLeftOutOfAa) {
  const auto r = evaluate(ConfusionMatrix(3, {8, 2, 0, 0, 0, 0, 1, 0, 9}));
  EXPECT_TRUE(std::isnan(r.per_class_recall[1]));
  EXPECT_NEAR(r.aa, (0.8 + 0.9) / 2, 1e-12);
}

TEST(Scores, DiagonalIffKappaOne) {
  Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    std::vector<std::uint64_t> c(9);
    for (auto& v : c) v = rng.below(5);
    const bool diagonal = c[1] + c[2] + c[3] + c[5] + c[6] + c[7] == 0;
    if (c[0] + c[4] + c[8] == 0 && diagonal) continue;
    const ConfusionMatrix m(3, c);
    const double pe = [&] {
      double s = 0;
      for (ClassId k = 1; k <= 3; ++k) s += static_cast<double>(m.row_total(k)) * m.col_total(k);
      return s / (static_cast<double>(m.total()) * m.total());
    }();
    if (pe == 1.0 && !diagonal) continue;
    EXPECT_EQ(oa_aa_kappa(m).kappa == 1.0, diagonal);
  }
}

TEST(Scores, ProportionalRowsGiveZeroKappa) {
  // rows proportional to the column margin (1:3)
  const auto s = oa_aa_kappa(ConfusionMatrix(2, {5, 15, 10, 30}));
  EXPECT_NEAR(s.kappa, 0.0, 1e-12);
}

TEST(Scores, PermutationInvariant) {
  const ConfusionMatrix m(3, {10, 2, 3, 4, 20, 1, 0, 5, 7});
  // relabel 1→3, 2→1, 3→2
  const int perm[3] = {2, 0, 1};
  std::vector<std::uint64_t> c(9);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) c[perm[a] * 3 + perm[b]] = m.at(a + 1, b + 1);
  const auto r1 = evaluate(m), r2 = evaluate(ConfusionMatrix(3, c));
  EXPECT_NEAR(r1.oa, r2.oa, 1e-15);
  EXPECT_NEAR(r1.aa, r2.aa, 1e-15);
  EXPECT_NEAR(r1.kappa, r2.kappa, 1e-15);
  for (int a = 0; a < 3; ++a) EXPECT_EQ(r1.per_class_recall[a], r2.per_class_recall[perm[a]]);
}

TEST(Aggregate, MeanAndSampleStd) {
  EvalReport a, b;
  a.oa = 0.6;
  b.oa = 0.8;
  a.matrix = ConfusionMatrix(1, {3});
  b.matrix = ConfusionMatrix(1, {4});
  const std::vector<EvalReport> v{a, b};
  const auto r = aggregate(v);
  EXPECT_NEAR(r.oa, 0.7, 1e-15);
  EXPECT_NEAR(r.oa_std, std::sqrt(0.02), 1e-12);
  EXPECT_EQ(r.repetitions, 2u);
  EXPECT_EQ(r.matrix.at(1, 1), 7u);
}

TEST(Aggregate, SingleAndIdentical) {
  const auto e = evaluate(ConfusionMatrix(2, {4, 1, 1, 4}));
  const std::vector<EvalReport> one{e};
  EXPECT_EQ(aggregate(one).oa_std, 0.0);
  const std::vector<EvalReport> same{e, e, e};
  const auto r = aggregate(same);
  EXPECT_EQ(r.oa_std, 0.0);
  EXPECT_EQ(r.kappa_std, 0.0);
  EXPECT_DOUBLE_EQ(r.oa, e.oa);
}
