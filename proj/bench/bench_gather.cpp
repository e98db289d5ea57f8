#include <benchmark/benchmark.h>

#include "soar/gather.hpp"
#include "soar/scenario.hpp"

namespace {

soar::TreeNetwork instance(int n) {
  soar::TreeNetwork t = soar::gen_complete_binary(n);
  return t.with_loads(soar::gen_loads(t, soar::LoadDistribution::kPowerLaw, 42));
}

void BM_GatherSerial(benchmark::State& state) {
  const auto tree = instance(static_cast<int>(state.range(0)));
  const int k = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(soar::gather(tree, k));
}

void BM_GatherParallel(benchmark::State& state) {
  const auto tree = instance(static_cast<int>(state.range(0)));
  const int k = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(soar::gather_parallel(tree, k));
}

void BM_Color(benchmark::State& state) {
  const auto tree = instance(static_cast<int>(state.range(0)));
  const int k = static_cast<int>(state.range(1));
  const auto tables = soar::gather(tree, k);
  for (auto _ : state) benchmark::DoNotOptimize(soar::color(tree, tables, k));
}

void sizes(benchmark::internal::Benchmark* b) {
  for (int n : {256, 1024, 4096}) {
    for (int k : {8, 32, 64}) b->Args({n, k});
  }
}

}  // namespace

BENCHMARK(BM_GatherSerial)->Apply(sizes)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GatherParallel)->Apply(sizes)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Color)->Apply(sizes)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
