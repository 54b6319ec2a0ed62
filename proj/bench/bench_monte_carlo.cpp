#include <benchmark/benchmark.h>

#include "ellctl/experiments.hpp"

namespace {

ellctl::MonteCarloOptions options(int jobs) {
  ellctl::MonteCarloOptions o;
  o.m = 16;
  o.jobs = jobs;
  return o;
}

void BM_MonteCarloSerial(benchmark::State& state) {
  const auto spec = ellctl::scenario("sim1");
  for (auto _ : state) {
    benchmark::DoNotOptimize(ellctl::monte_carlo_serial(spec, options(1)));
  }
  state.SetItemsProcessed(state.iterations() * 16 * 3);
}

void BM_MonteCarloParallel(benchmark::State& state) {
  const auto spec = ellctl::scenario("sim1");
  const int jobs = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(ellctl::monte_carlo_parallel(spec, options(jobs)));
  }
  state.SetItemsProcessed(state.iterations() * 16 * 3);
}

}  // namespace

BENCHMARK(BM_MonteCarloSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_MonteCarloParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
