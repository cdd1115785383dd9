#include "powerlab/generators.hpp"
#include "powerlab/rng.hpp"
#include "powerlab/search.hpp"

#include <benchmark/benchmark.h>

using namespace powerlab;

static void BM_CycleSearchGnp(benchmark::State &state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const int r = static_cast<int>(state.range(1));
  std::uint64_t i = 0;
  for (auto _ : state) {
    state.PauseTiming();
    const LayeredGraph g(n, gen_gnp(n, 0.8, derive_seed(11, i++)));
    state.ResumeTiming();
    benchmark::DoNotOptimize(find_power_ham_cycle(g, r).verdict);
  }
}
BENCHMARK(BM_CycleSearchGnp)->ArgsProduct({{9, 12, 16, 20}, {2, 3}});

// Not-found instances force the search to exhaust the tree.
static void BM_CycleSearchMultipartite(benchmark::State &state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto c = gen_complete_multipartite(balanced_sizes(n, 2));
  for (auto _ : state)
    benchmark::DoNotOptimize(find_power_ham_cycle(c.graph, 3).verdict);
}
BENCHMARK(BM_CycleSearchMultipartite)->Arg(8)->Arg(10)->Arg(12)->Arg(14);

static void BM_OracleCycle(benchmark::State &state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const LayeredGraph g(n, gen_gnp(n, 0.5, 3));
  for (auto _ : state)
    benchmark::DoNotOptimize(oracle_contains_power_ham_cycle(g, 2));
}
BENCHMARK(BM_OracleCycle)->DenseRange(6, 9);

static void BM_PackingXY(benchmark::State &state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto g = perturb(gen_xy_construction(n, 0.01).graph, 5.0 / static_cast<double>(n), 1);
  for (auto _ : state)
    benchmark::DoNotOptimize(max_clique_packing(g, 7).cliques.size());
}
// n = 28 already takes tens of seconds per run.
BENCHMARK(BM_PackingXY)->Arg(21)->Unit(benchmark::kMillisecond);

static void BM_PackingGnp(benchmark::State &state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const LayeredGraph g(n, gen_gnp(n, 0.6, 2));
  for (auto _ : state)
    benchmark::DoNotOptimize(max_clique_packing(g, 4).cliques.size());
}
BENCHMARK(BM_PackingGnp)->Arg(16)->Arg(24)->Arg(32)->Unit(benchmark::kMillisecond);
