#include "powerlab/generators.hpp"
#include "powerlab/regularity.hpp"

#include <benchmark/benchmark.h>

using namespace powerlab;

namespace {

LayeredGraph random_pair(std::size_t side, double p) {
  std::vector<Edge> edges;
  for (const auto &e : gen_gnp(2 * side, p, 17))
    if ((e.u < side) != (e.v < side))
      edges.push_back(e);
  return LayeredGraph(2 * side, edges);
}

} // namespace

static void BM_RegularExact(benchmark::State &state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const auto g = random_pair(side, 0.5);
  const auto v1 = VertexSet::interval(2 * side, 0, static_cast<Vertex>(side));
  const auto v2 = VertexSet::interval(2 * side, static_cast<Vertex>(side), static_cast<Vertex>(2 * side));
  for (auto _ : state)
    benchmark::DoNotOptimize(is_eps_regular_exact(g, Layer::combined, v1, v2, 0.3).deviation);
}
BENCHMARK(BM_RegularExact)->DenseRange(8, 16, 4)->Unit(benchmark::kMillisecond);

static void BM_RegularSampled(benchmark::State &state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const auto g = random_pair(side, 0.5);
  const auto v1 = VertexSet::interval(2 * side, 0, static_cast<Vertex>(side));
  const auto v2 = VertexSet::interval(2 * side, static_cast<Vertex>(side), static_cast<Vertex>(2 * side));
  for (auto _ : state)
    benchmark::DoNotOptimize(is_eps_regular_sampled(g, Layer::combined, v1, v2, 0.3, 2000, 5).deviation);
}
BENCHMARK(BM_RegularSampled)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_CountEmbeddings(benchmark::State &state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const LayeredGraph tri(3, std::vector<Edge>{{0, 1}, {1, 2}, {0, 2}});
  const auto n = 3 * side;
  const LayeredGraph g(n, gen_gnp(n, 0.5, 9));
  std::vector<VertexSet> sigma;
  for (std::size_t i = 0; i < 3; ++i)
    sigma.push_back(VertexSet::interval(n, static_cast<Vertex>(i * side), static_cast<Vertex>((i + 1) * side)));
  for (auto _ : state)
    benchmark::DoNotOptimize(count_embeddings(tri, g, Layer::combined, sigma));
}
BENCHMARK(BM_CountEmbeddings)->Arg(8)->Arg(32)->Arg(64);
