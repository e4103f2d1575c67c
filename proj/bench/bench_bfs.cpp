#include <benchmark/benchmark.h>

#include <random>

#include "nilcayley/cayley.hpp"
#include "nilcayley/harness.hpp"

using namespace nilcayley;

namespace {

// H_{q,4} with three random generators; fixed seed so every variant sees the same graph.
std::pair<GroupSpec, GeneratingSet> instance(std::int64_t q) {
  const GroupSpec spec = GroupSpec::unitriangular(q, 4);
  std::mt19937_64 rng(7);
  return {spec, sample_generating_set(spec, 3, SamplingMode::iid_generators, rng)};
}

void report(benchmark::State& state, const GroupSpec& spec, const GeneratingSet& gens) {
  state.counters["relaxations/s"] = benchmark::Counter(
      static_cast<double>(spec.order() * gens.symmetric().size()), benchmark::Counter::kIsIterationInvariantRate);
}

void BM_Reference(benchmark::State& state) {
  const auto [spec, gens] = instance(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(bfs_reference(spec, gens));
  report(state, spec, gens);
}

void BM_KernelDistanceMap(benchmark::State& state) {
  const auto [spec, gens] = instance(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(bfs_distance_map(spec, gens));
  report(state, spec, gens);
}

void BM_KernelEccentricity(benchmark::State& state) {
  const auto [spec, gens] = instance(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(bfs_eccentricity(spec, gens));
  report(state, spec, gens);
}

}  // namespace

BENCHMARK(BM_Reference)->Arg(7)->Arg(11)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KernelDistanceMap)->Arg(7)->Arg(11)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KernelEccentricity)->Arg(7)->Arg(11)->Arg(16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
