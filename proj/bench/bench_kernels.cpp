// OpenMP kernels against the serial reference on the same inputs.

#include <benchmark/benchmark.h>

#include "hsi/features.hpp"
#include "hsi/filters.hpp"
#include "hsi/leakage.hpp"
#include "hsi/reference.hpp"
#include "hsi/rng.hpp"
#include "hsi/sampling.hpp"
#include "hsi/synthgen.hpp"

using namespace hsi;

namespace {

HyperCube noise_cube(std::size_t side, std::size_t bands) {
  Rng rng(1);
  std::vector<float> v(side * side * bands);
  for (auto& x : v) x = static_cast<float>(rng.normal());
  return HyperCube(side, side, bands, std::move(v));
}

Plane noise_plane(std::size_t side) {
  Rng rng(2);
  Plane p(side, side);
  for (auto& x : p.data) x = rng.normal();
  return p;
}

SplitMask stratified(std::size_t side) {
  synth::SceneConfig cfg;
  cfg.height = cfg.width = side;
  cfg.classes = 8;
  return sampling::stratified_random_split(synth::generate_layout(cfg), 0.1, 3);
}

void MeanFilter(benchmark::State& state) {
  const auto cube = noise_cube(static_cast<std::size_t>(state.range(0)), 32);
  for (auto _ : state) benchmark::DoNotOptimize(filters::mean_filter(cube, filters::WindowSpec::square(5)));
}
void MeanFilterReference(benchmark::State& state) {
  const auto cube = noise_cube(static_cast<std::size_t>(state.range(0)), 32);
  for (auto _ : state) benchmark::DoNotOptimize(reference::mean_filter(cube, filters::WindowSpec::square(5)));
}

void Gaussian(benchmark::State& state) {
  const auto cube = noise_cube(static_cast<std::size_t>(state.range(0)), 32);
  for (auto _ : state) benchmark::DoNotOptimize(filters::gaussian_filter(cube, {1.5}));
}
void GaussianReference(benchmark::State& state) {
  const auto cube = noise_cube(static_cast<std::size_t>(state.range(0)), 32);
  for (auto _ : state) benchmark::DoNotOptimize(reference::gaussian_filter(cube, {1.5}));
}

void Opening(benchmark::State& state) {
  const auto plane = noise_plane(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(features::morph_open(plane, 3));
}
void OpeningReference(benchmark::State& state) {
  const auto plane = noise_plane(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::morph_open(plane, 3));
}

void Overlap(benchmark::State& state) {
  const auto split = stratified(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(leakage::overlap_rate(split, 7));
}
void OverlapReference(benchmark::State& state) {
  const auto split = stratified(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::overlap_rate(split, 7));
}

void Correlation(benchmark::State& state) {
  const auto cube = noise_cube(static_cast<std::size_t>(state.range(0)), 32);
  for (auto _ : state) benchmark::DoNotOptimize(leakage::mean_correlation(cube, 0, 1));
}
void CorrelationReference(benchmark::State& state) {
  const auto cube = noise_cube(static_cast<std::size_t>(state.range(0)), 32);
  for (auto _ : state) benchmark::DoNotOptimize(reference::mean_correlation(cube, 0, 1));
}

}  // namespace

BENCHMARK(MeanFilter)->Arg(64)->Arg(145)->Unit(benchmark::kMillisecond);
BENCHMARK(MeanFilterReference)->Arg(64)->Arg(145)->Unit(benchmark::kMillisecond);
BENCHMARK(Gaussian)->Arg(64)->Arg(145)->Unit(benchmark::kMillisecond);
BENCHMARK(GaussianReference)->Arg(64)->Arg(145)->Unit(benchmark::kMillisecond);
BENCHMARK(Opening)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(OpeningReference)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(Overlap)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(OverlapReference)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(Correlation)->Arg(64)->Arg(145)->Unit(benchmark::kMillisecond);
BENCHMARK(CorrelationReference)->Arg(64)->Arg(145)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
