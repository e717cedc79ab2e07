#include <benchmark/benchmark.h>

#include <random>

#include "htsne/affinity.hpp"
#include "htsne/experiments.hpp"
#include "htsne/gradient.hpp"
#include "htsne/interpolation.hpp"
#include "htsne/kernel.hpp"

using namespace htsne;

namespace {

Embedding random_embedding(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 10.0);
  Embedding e(n);
  for (std::size_t i = 0; i < n; ++i) {
    e.x(i) = g(rng);
    e.y(i) = g(rng);
  }
  return e;
}

// alpha arrives as alpha * 100 so integer and fractional paths both show up.
void BM_KernelValue(benchmark::State& state) {
  const Kernel k(KernelParams::simplified(state.range(0) / 100.0));
  double d2 = 0.0, acc = 0.0;
  for (auto _ : state) {
    acc += k.value(d2);
    d2 += 1e-3;
    if (d2 > 100.0) d2 = 0.0;
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_KernelValue)->Arg(50)->Arg(100)->Arg(200)->Arg(70)->Arg(10000);

void BM_RepulsionExact(benchmark::State& state) {
  const auto e = random_embedding(static_cast<std::size_t>(state.range(0)), 1);
  const auto params = KernelParams::simplified(0.5);
  for (auto _ : state) benchmark::DoNotOptimize(repulsive_forces_exact(e, params).z);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_RepulsionExact)->RangeMultiplier(2)->Range(500, 4000)->Unit(benchmark::kMillisecond);

void BM_RepulsionInterp(benchmark::State& state) {
  const auto e = random_embedding(static_cast<std::size_t>(state.range(0)), 1);
  const auto params = KernelParams::simplified(state.range(1) / 100.0);
  for (auto _ : state) benchmark::DoNotOptimize(repulsive_forces_interp(e, params).z);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_RepulsionInterp)
    ->ArgsProduct({{500, 4000, 32000}, {50, 100}})
    ->Unit(benchmark::kMillisecond);

void BM_Affinities(benchmark::State& state) {
  const auto d = gen_gaussian_clusters(static_cast<std::size_t>(state.range(0)) / 10, 10, 10, 4.0, 0);
  const auto mode = state.range(1) ? NeighborMode::Approximate : NeighborMode::Exact;
  for (auto _ : state) benchmark::DoNotOptimize(build_affinities(d.data, 30.0, mode, 0).nonzeros());
}
BENCHMARK(BM_Affinities)->ArgsProduct({{1000, 5000}, {0, 1}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
