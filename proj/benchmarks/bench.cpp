#include <benchmark/benchmark.h>

#include "ranklab/bounds.hpp"
#include "ranklab/poisson.hpp"
#include "ranklab/stopping.hpp"
#include "ranklab/walk.hpp"

using namespace ranklab;

static void BM_PhiloxUniform(benchmark::State& state) {
  RngStream rng(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(rng.uniform());
}
BENCHMARK(BM_PhiloxUniform);

static void BM_SupremumExp(benchmark::State& state) {
  RngStream rng(2, 0);
  const auto spec = DistributionSpec::exponential(1.0);
  const double lambda = static_cast<double>(state.range(0)) / 10.0;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_supremum(spec, lambda, rng));
}
BENCHMARK(BM_SupremumExp)->Arg(15)->Arg(20)->Arg(30);

static void BM_SupremumPareto(benchmark::State& state) {
  RngStream rng(3, 0);
  const auto spec = DistributionSpec::pareto(2.5, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_supremum(spec, 3.0, rng));
}
BENCHMARK(BM_SupremumPareto);

static void BM_MemorylessSampler(benchmark::State& state) {
  const auto n = state.range(0);
  const auto h = memoryless_family_rule({2.0, 1.0, 0.0})->memoryless_thresholds(n);
  const MemorylessSampler sampler(*h);
  RngStream rng(4, 0);
  for (auto _ : state) benchmark::DoNotOptimize(sampler.sample(rng));
}
BENCHMARK(BM_MemorylessSampler)->Arg(1000)->Arg(100000);

static void BM_FullSampleEpisode(benchmark::State& state) {
  const auto rule = memoryless_family_rule({2.0, 1.0, 0.0});
  RngStream rng(5, 0);
  for (auto _ : state) benchmark::DoNotOptimize(run_episode(*rule, state.range(0), rng));
}
BENCHMARK(BM_FullSampleEpisode)->Arg(1000);

static void BM_CoupledDecompositionChecks(benchmark::State& state) {
  const std::vector<double> lambdas{1.5, 2.0, 3.0};
  RngStream rng(6, 0);
  for (auto _ : state) {
    const auto s = draw_coupled(state.range(0), lambdas, rng, {});
    for (std::size_t w = 0; w < lambdas.size(); ++w)
      benchmark::DoNotOptimize(check_decomposition(s, w, state.range(0) / 2, 2.0, 0.1));
  }
}
BENCHMARK(BM_CoupledDecompositionChecks)->Arg(100)->Arg(1000);

static void BM_PoissonEpisode(benchmark::State& state) {
  const auto rule = PoissonRule::reciprocal(2.0, 50.0);
  RngStream rng(7, 0);
  for (auto _ : state) benchmark::DoNotOptimize(run_poisson_episode(rule, 50.0, rng));
}
BENCHMARK(BM_PoissonEpisode);

static void BM_RelativeRankDP(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(dp_relative_rank(state.range(0)));
}
BENCHMARK(BM_RelativeRankDP)->Arg(1000);

BENCHMARK_MAIN();
