// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "hsi/cli.hpp"
#include "hsi/features.hpp"
#include "hsi/filters.hpp"
#include "hsi/harness.hpp"
#include "hsi/leakage.hpp"
#include "hsi/metrics.hpp"
#include "hsi/sampling.hpp"
#include "hsi/synthgen.hpp"
#include "support.hpp"

using namespace hsi;
using sampling::Strategy;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

// Cells shared by two w×w windows offset by (dy, dx), counted one by one.
double overlap_by_cells(std::size_t w, std::ptrdiff_t dy, std::ptrdiff_t dx) {
  const auto r = static_cast<std::ptrdiff_t>(w / 2);
  std::size_t shared = 0;
  for (std::ptrdiff_t y = -r; y <= r; ++y)
    for (std::ptrdiff_t x = -r; x <= r; ++x) shared += (std::abs(y - dy) <= r && std::abs(x - dx) <= r);
  return static_cast<double>(shared) / static_cast<double>(w * w);
}

std::size_t expected_quota(std::size_t n, double rate) {
  const auto q = static_cast<std::size_t>(std::floor(static_cast<double>(n) * rate + 0.5));
  return std::clamp<std::size_t>(q, 1, n - 1);
}

Outcome window_overlap() {
  bool ok = leakage::pairwise_window_overlap(3, 0, 1) == 2.0 / 3.0 && leakage::pairwise_window_overlap(5, 0, 1) == 0.8;
  std::size_t checked = 0;
  for (std::size_t w = 1; w <= 15; w += 2) {
    const double closed = static_cast<double>(w - 1) / static_cast<double>(w);
    ok = ok && std::abs(leakage::pairwise_window_overlap(w, 0, 1) - closed) < 1e-15;
    ok = ok && std::abs(leakage::pairwise_window_overlap(w, 1, 0) - closed) < 1e-15;
    const auto span = static_cast<std::ptrdiff_t>(w + 1);
    for (std::ptrdiff_t dy = -span; dy <= span; ++dy)
      for (std::ptrdiff_t dx = -span; dx <= span; ++dx, ++checked)
        ok = ok && std::abs(leakage::pairwise_window_overlap(w, dy, dx) - overlap_by_cells(w, dy, dx)) < 1e-15;
  }
  return {ok, std::to_string(checked) + " offsets"};
}

Outcome sampling_quotas() {
  std::size_t bad = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto labels = test::random_labels(5000 + s, 20 + s % 17, 24 + s % 11, 2 + s % 5);
    const double rate = 0.05 + 0.05 * static_cast<double>(s % 5);
    std::map<ClassId, std::set<Pixel>> by_class;
    for (std::size_t y = 0; y < labels.height(); ++y)
      for (std::size_t x = 0; x < labels.width(); ++x)
        if (labels.at(y, x)) by_class[labels.at(y, x)].insert({y, x});
    for (auto strategy : {Strategy::StratifiedRandom, Strategy::ControlledRandom}) {
      const auto split = sampling::make_split(labels, {rate, s, strategy});
      for (const auto& [c, cells] : by_class) {
        std::set<Pixel> train;
        for (const auto& p : cells)
          if (split.at(p.y, p.x) == SplitState::Train) train.insert(p);
        if (train.size() != expected_quota(cells.size(), rate)) ++bad;
        if (strategy != Strategy::ControlledRandom) continue;
        // each partition (flood-filled here, independently of the sampler) holds at most one grown region
        std::set<Pixel> left = cells;
        while (!left.empty()) {
          std::set<Pixel> part{*left.begin()};
          std::vector<Pixel> stack{*left.begin()};
          left.erase(left.begin());
          while (!stack.empty()) {
            const Pixel p = stack.back();
            stack.pop_back();
            for (int dy = -1; dy <= 1; ++dy)
              for (int dx = -1; dx <= 1; ++dx) {
                if ((dy < 0 && p.y == 0) || (dx < 0 && p.x == 0)) continue;
                const Pixel nb{p.y + dy, p.x + dx};
                if (left.erase(nb)) {
                  part.insert(nb);
                  stack.push_back(nb);
                }
              }
          }
          std::set<Pixel> grown;
          for (const auto& p : part)
            if (train.count(p)) grown.insert(p);
          if (test::components_8(grown) > 1) ++bad;
        }
      }
    }
  }
  return {bad == 0, std::to_string(bad) + " violations over 100 maps"};
}

synth::SceneConfig grid_scene(std::uint64_t seed) {
  synth::SceneConfig cfg;
  cfg.height = cfg.width = 64;
  cfg.bands = 16;
  cfg.classes = 16;
  cfg.layout = synth::GridBlocks{};
  cfg.rng_seed = seed;
  return cfg;
}

Outcome leakage_reduction() {
  std::size_t wins = 0;
  std::vector<double> ratios;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto labels = synth::generate_layout(grid_scene(s));
    const double strat = leakage::overlap_rate(sampling::stratified_random_split(labels, 0.1, s), 3);
    const double ctrl = leakage::overlap_rate(sampling::controlled_random_split(labels, 0.1, s), 3);
    wins += ctrl < strat;
    ratios.push_back(strat > 0 ? ctrl / strat : 1.0);
  }
  std::nth_element(ratios.begin(), ratios.begin() + 50, ratios.end());
  const double hi = ratios[50];
  const double lo = *std::max_element(ratios.begin(), ratios.begin() + 50);
  const double median = 0.5 * (lo + hi);
  char buf[96];
  std::snprintf(buf, sizeof buf, "controlled lower in %zu/100, median ratio %.3f", wins, median);
  return {wins >= 95 && median <= 0.5, buf};
}

Outcome overlap_monotone() {
  const std::vector<double> rates{0.05, 0.1, 0.25};
  const std::vector<std::size_t> windows{1, 3, 5, 7, 9, 11};
  std::size_t bad = 0;
  std::string detail;
  for (auto strategy : {Strategy::StratifiedRandom, Strategy::ControlledRandom}) {
    std::vector<std::vector<double>> mean(rates.size(), std::vector<double>(windows.size(), 0.0));
    for (std::uint64_t s = 0; s < 50; ++s) {
      synth::SceneConfig cfg;
      cfg.height = cfg.width = 48;
      cfg.classes = 5;
      cfg.rng_seed = 900 + s;
      const auto labels = synth::generate_layout(cfg);
      const auto curve = leakage::overlap_curve(labels, strategy, rates, windows, s);
      for (std::size_t r = 0; r < rates.size(); ++r)
        for (std::size_t k = 0; k < windows.size(); ++k) {
          if (k && curve.values[r][k] < curve.values[r][k - 1]) ++bad;
          mean[r][k] += curve.values[r][k] / 50.0;
        }
    }
    for (std::size_t k = 1; k < windows.size(); ++k)
      for (std::size_t r = 1; r < rates.size(); ++r) bad += mean[r][k] < mean[r - 1][k];
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s w=3: %.3f %.3f %.3f; ", sampling::to_string(strategy), mean[0][1], mean[1][1],
                  mean[2][1]);
    detail += buf;
  }
  return {bad == 0, detail + std::to_string(bad) + " violations"};
}

Outcome dependence() {
  std::size_t passed = 0;
  double sum1 = 0, sum3 = 0, sum5 = 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto noise = test::random_cube(7000 + s, 40, 40, 32);
    const auto f3 = filters::mean_filter(noise, filters::WindowSpec::square(3));
    const auto f5 = filters::mean_filter(noise, filters::WindowSpec::square(5));
    const auto c1 = leakage::correlation_decay(noise, leakage::Axis::X, 6);
    const auto c3 = leakage::correlation_decay(f3, leakage::Axis::X, 6);
    const auto c5 = leakage::correlation_decay(f5, leakage::Axis::X, 6);
    bool ok = *c5.rho[1] > *c3.rho[1] && *c3.rho[1] > *c1.rho[1];
    for (const auto* c : {&c1, &c3, &c5}) ok = ok && std::abs(*c->rho[0] - 1.0) < 1e-12;
    // beyond the support the windows no longer share a cell
    for (std::size_t lag = 1; lag <= 6; ++lag) ok = ok && std::abs(*c1.rho[lag]) < 0.05;
    for (std::size_t lag = 3; lag <= 6; ++lag) ok = ok && std::abs(*c3.rho[lag]) < 0.05;
    for (std::size_t lag = 5; lag <= 6; ++lag) ok = ok && std::abs(*c5.rho[lag]) < 0.05;
    passed += ok;
    sum1 += *c1.rho[1];
    sum3 += *c3.rho[1];
    sum5 += *c5.rho[1];
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "%zu/50 seeds; mean lag-1 rho %.3f / %.3f / %.3f", passed, sum1 / 50, sum3 / 50,
                sum5 / 50);
  return {passed >= 48, buf};
}

// Clustered scene used by the classification checks.
harness::ExperimentConfig clustered(double rate, std::size_t repetitions) {
  synth::SceneConfig scene;
  scene.height = scene.width = 64;
  scene.bands = 16;
  scene.classes = 6;
  scene.layout = synth::VoronoiBlobs{4};
  scene.noise_sigma = 0.8;
  scene.signature_separation = 1.0;
  scene.rng_seed = 11;
  harness::ExperimentConfig cfg;
  cfg.dataset = scene;
  cfg.strategies = {Strategy::StratifiedRandom, Strategy::ControlledRandom};
  cfg.rates = {rate};
  cfg.repetitions = repetitions;
  cfg.master_seed = 2024;
  return cfg;
}

double mean_oa(const harness::ExperimentResult& r, Strategy strategy, const std::string& feature) {
  for (const auto& a : r.aggregates)
    if (a.strategy == strategy && a.feature == feature && a.report) return a.report->oa;
  return std::nan("");
}

Outcome spatial_vs_spectral() {
  auto cfg = clustered(0.05, 5);
  cfg.features = {harness::SpatialCoords{}};
  cfg.classifier = harness::Knn{1};
  const auto coords = harness::run_experiment(cfg);
  cfg.features = {harness::RawSpectral{}};
  cfg.classifier = harness::LinearSvm{};
  const auto raw = harness::run_experiment(cfg);
  const double sc = mean_oa(coords, Strategy::StratifiedRandom, "coords");
  const double sr = mean_oa(raw, Strategy::StratifiedRandom, "raw");
  const double cc = mean_oa(coords, Strategy::ControlledRandom, "coords");
  const double cr = mean_oa(raw, Strategy::ControlledRandom, "raw");
  const double gap = sc - sr, gap_ctrl = cc - cr;
  char buf[160];
  std::snprintf(buf, sizeof buf, "stratified %.3f vs %.3f, controlled %.3f vs %.3f", sc, sr, cc, cr);
  return {gap > 0 && gap_ctrl <= 0.5 * gap, buf};
}

Outcome filter_sweep() {
  auto cfg = clustered(0.2, 10);
  cfg.features = {harness::RawSpectral{}};
  for (std::size_t w : {3, 5, 7, 9}) cfg.features.push_back(harness::MeanFilterThenRaw{w});
  cfg.classifier = harness::Knn{1};
  const auto r = harness::run_experiment(cfg);
  std::string detail;
  std::map<Strategy, std::map<std::size_t, double>> oa;
  for (auto strategy : {Strategy::StratifiedRandom, Strategy::ControlledRandom}) {
    detail += sampling::to_string(strategy);
    for (std::size_t w : {1, 3, 5, 7, 9}) {
      oa[strategy][w] = mean_oa(r, strategy, w == 1 ? "raw" : "mean:" + std::to_string(w));
      char buf[16];
      std::snprintf(buf, sizeof buf, " %.3f", oa[strategy][w]);
      detail += buf;
    }
    detail += "; ";
  }
  const auto& s = oa[Strategy::StratifiedRandom];
  const auto& c = oa[Strategy::ControlledRandom];
  return {s.at(3) > s.at(1) && c.at(3) > c.at(1) && c.at(9) < c.at(3), detail};
}

Outcome metrics_oracle() {
  const auto near = [](const metrics::Scores& s, double oa, double aa, double k) {
    return std::abs(s.oa - oa) <= 1e-12 && std::abs(s.aa - aa) <= 1e-12 && std::abs(s.kappa - k) <= 1e-12;
  };
  bool ok = near(metrics::oa_aa_kappa(ConfusionMatrix(2, {40, 10, 20, 30})), 0.7, 0.7, 0.4);
  ok = ok && near(metrics::oa_aa_kappa(ConfusionMatrix(3, {5, 0, 0, 0, 7, 0, 0, 0, 9})), 1.0, 1.0, 1.0);
  // independent rows: observed agreement equals chance agreement
  ok = ok && near(metrics::oa_aa_kappa(ConfusionMatrix(2, {25, 25, 25, 25})), 0.5, 0.5, 0.0);
  return {ok, "three matrices"};
}

Outcome feature_contracts() {
  bool ok = true;
  for (std::size_t b : {8, 12, 20}) {
    const auto c = test::random_cube(b, 12, 12, b);
    const std::vector<Pixel> px{{0, 0}, {5, 7}};
    ok = ok && features::dwt3d_features(c, px).dim() == 45 * b;
    for (std::size_t m : {1, 2, 3})
      for (std::size_t n : {1, 2, 3}) ok = ok && features::emp_features(c, px, {m, n, true}).dim() == m * (2 * n + 1) + b;
  }
  Rng rng(77);
  double worst = 0.0;
  for (std::size_t trial = 0; trial < 50; ++trial) {
    std::vector<double> signal(3 + rng.below(60));
    for (auto& v : signal) v = rng.normal() * 100.0;
    for (std::size_t d : {1, 2, 4, 8}) {
      const auto [lo, hi] = features::haar_split(signal, d);
      for (std::size_t i = 0; i < signal.size(); ++i) {
        worst = std::max(worst, std::abs(lo[i] + hi[i] - signal[i]));
        if (std::abs(lo[i] + hi[i] - signal[i]) > 1e-12) ok = false;
      }
    }
  }
  std::size_t order_bad = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    Rng r(300 + s);
    Plane p(20, 18);
    for (auto& v : p.data) v = r.normal();
    const auto prof = features::morphological_profile(p, 4);
    // prof = [o4, o3, o2, o1, plane, c1, ...]: larger openings sit earlier and are pointwise smaller
    for (std::size_t k = 0; k < 4; ++k)
      for (std::size_t i = 0; i < p.data.size(); ++i) order_bad += prof[k].data[i] > prof[k + 1].data[i];
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "haar max error %.1e, granulometry violations %zu", worst, order_bad);
  return {ok && order_bad == 0, buf};
}

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome determinism() {
  test::TempDir dir;
  const std::string cfg = std::string(HSI_SOURCE_DIR) + "/configs/example.cfg";
  for (const char* out : {"a", "b"}) {
    const std::string target = dir / out;
    const char* argv[] = {"hsi", "run", "--config", cfg.c_str(), "--output", target.c_str()};
    std::ostringstream o, e;
    if (cli::run(6, argv, o, e) != 0) return {false, "run failed: " + e.str()};
  }
  const auto a = slurp(dir / "a/results.csv");
  const auto b = slurp(dir / "b/results.csv");
  return {!a.empty() && a == b, std::to_string(a.size()) + " bytes"};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"window overlap closed form", window_overlap},
      {"sampling quotas and connectivity", sampling_quotas},
      {"controlled sampling reduces overlap", leakage_reduction},
      {"overlap monotone in window and rate", overlap_monotone},
      {"filtering amplifies dependence", dependence},
      {"spatial coordinates vs spectral", spatial_vs_spectral},
      {"filter sweep shape", filter_sweep},
      {"metrics oracle", metrics_oracle},
      {"feature contracts", feature_contracts},
      {"run determinism", determinism},
  };
  int failed = 0, index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome o{false, ""};
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %2d %s (%.2fs): %s\n", o.pass ? "PASS" : "FAIL", index, name, secs, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
