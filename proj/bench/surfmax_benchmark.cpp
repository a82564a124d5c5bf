// Serial reference vs OpenMP paths for the two trial-parallel kernels.
//
//   ./surfmax_benchmark --benchmark_filter=Bench
//   OMP_NUM_THREADS=8 ./surfmax_benchmark

#include <benchmark/benchmark.h>

#include "surfmax/bench.hpp"
#include "surfmax/rbf_analysis.hpp"
#include "surfmax/synthetic_oracles.hpp"

namespace {

using namespace surfmax;

ExecutionPolicy policy_of(const benchmark::State& state) {
  return state.range(0) ? ExecutionPolicy::Parallel : ExecutionPolicy::Serial;
}

void BM_RunBench(benchmark::State& state) {
  BenchConfig cfg = default_bench_config();
  cfg.n_trials = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_bench(cfg, policy_of(state)));
  }
  state.SetItemsProcessed(state.iterations() * state.range(1));
}
BENCHMARK(BM_RunBench)
    ->ArgNames({"parallel", "trials"})
    ->Args({0, 100})
    ->Args({1, 100})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

void BM_TriangleExtrema(benchmark::State& state) {
  Rng rng(3);
  RbfMixtureSpec spec;
  spec.min_width = 0.5;
  spec.max_width = 2.0;
  spec.center_scale = 3.0;
  RbfOracle oracle(random_rbf_mixture(rng, 16, spec));
  LandscapeOptions opts;
  opts.latent_scale = 3.0;
  opts.policy = policy_of(state);
  const auto n = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(count_triangle_extrema(oracle, n, 32, 0, opts));
  }
  state.SetItemsProcessed(state.iterations() * state.range(1));
}
BENCHMARK(BM_TriangleExtrema)
    ->ArgNames({"parallel", "triangles"})
    ->Args({0, 200})
    ->Args({1, 200})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
