#include "powerlab/generators.hpp"
#include "powerlab/pipeline.hpp"

#include <benchmark/benchmark.h>

using namespace powerlab;

namespace {

LayeredGraph complete_graph(std::size_t n) {
  std::vector<Edge> edges;
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v)
      edges.push_back({u, v});
  return LayeredGraph(n, edges);
}

} // namespace

static void BM_BicanonicalPath(benchmark::State &state) {
  const auto size = static_cast<std::size_t>(state.range(0));
  const auto c = gen_blowup(complete_graph(3), size);
  const auto g = perturb(c.graph, 0.7, 4);
  const auto n = g.order();
  const SetTuple sets{c.parts[0], c.parts[1], c.parts[2], c.parts[0]};
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        build_bicanonical_path(g, 1, sets, VertexSet(n), VertexSet(n), 0.2, PipelineParams{}, ++seed).nodes);
}
BENCHMARK(BM_BicanonicalPath)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMicrosecond);

static void BM_LocalAbsorber(benchmark::State &state) {
  const auto xs = static_cast<std::size_t>(state.range(0));
  const auto c = gen_blowup(complete_graph(4), 40);
  const auto g = perturb(c.graph, 0.5, 7);
  VertexSet x(160);
  for (Vertex v = 0; v < xs; ++v)
    x.insert(v);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    const auto res = build_absorber_local(g, 1, x, SetTuple{c.parts[2], c.parts[3]}, c.parts[1],
                                          VertexSet(160), 0.5, PipelineParams{}, ++seed);
    benchmark::DoNotOptimize(res.gadget.path.size());
  }
}
BENCHMARK(BM_LocalAbsorber)->DenseRange(1, 6)->Unit(benchmark::kMillisecond);

static void BM_VerifyAbsorbing(benchmark::State &state) {
  const auto xs = static_cast<std::size_t>(state.range(0));
  const auto c = gen_blowup(complete_graph(4), 40);
  const auto g = perturb(c.graph, 0.5, 7);
  VertexSet x(160);
  for (Vertex v = 0; v < xs; ++v)
    x.insert(v);
  const auto res = build_absorber_local(g, 1, x, SetTuple{c.parts[2], c.parts[3]}, c.parts[1],
                                        VertexSet(160), 0.5, PipelineParams{}, 1);
  for (auto _ : state)
    benchmark::DoNotOptimize(verify_absorbing(g, res.gadget));
}
BENCHMARK(BM_VerifyAbsorbing)->DenseRange(2, 6, 2)->Unit(benchmark::kMillisecond);
