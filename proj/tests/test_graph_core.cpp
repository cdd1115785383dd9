#include "doctest.h"
#include "oracle.hpp"

#include "powerlab/error.hpp"
#include "powerlab/generators.hpp"
#include "powerlab/graph.hpp"
#include "powerlab/io.hpp"
#include "powerlab/rng.hpp"
#include "powerlab/tuple.hpp"

#include <sstream>

using namespace powerlab;

namespace {

LayeredGraph random_layered(std::size_t n, double pg, double pr, std::uint64_t seed) {
  return LayeredGraph(n, gen_gnp(n, pg, seed), gen_gnp(n, pr, seed + 99));
}

} // namespace

TEST_CASE("common neighbourhood of the empty set is the target") {
  LayeredGraph g(5, std::vector<Edge>{{0, 1}});
  const VertexSet y(5, {1, 2, 3});
  CHECK(common_neighborhood(g, Layer::combined, VertexSet(5), y) == y);
  CHECK(common_neighborhood(g, Layer::gamma, VertexTuple{}, y) == y);
}

TEST_CASE("common neighbourhood matches a direct scan in every layer") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto g = random_layered(14, 0.4, 0.3, seed);
    Rng rng(seed);
    VertexSet x(14), y(14);
    for (Vertex v = 0; v < 14; ++v) {
      if (rng.bernoulli(0.25))
        x.insert(v);
      else if (rng.bernoulli(0.7))
        y.insert(v);
    }
    for (auto layer : {Layer::gamma, Layer::random, Layer::combined}) {
      const auto m = oracle::adjacency(g, layer);
      VertexSet expect(14);
      y.for_each([&](Vertex v) {
        bool all = true;
        x.for_each([&](Vertex u) { all = all && m[u][v]; });
        if (all)
          expect.insert(v);
      });
      CHECK(common_neighborhood(g, layer, x, y) == expect);
    }
  }
}

TEST_CASE("a pair offered to both layers is kept in gamma only") {
  const std::vector<Edge> gamma{{0, 1}, {1, 2}};
  const std::vector<Edge> random{{1, 0}, {2, 3}};
  LayeredGraph g(4, gamma, random);
  CHECK(g.adjacent(0, 1, Layer::gamma));
  CHECK_FALSE(g.adjacent(0, 1, Layer::random));
  CHECK(g.adjacent(2, 3, Layer::random));
  CHECK(g.edge_count(Layer::combined) == 3);
  CHECK(g.edge_count(Layer::gamma) + g.edge_count(Layer::random) == 3);
}

TEST_CASE("self-loops and out-of-range endpoints are rejected") {
  const std::vector<Edge> loop{{2, 2}};
  CHECK_THROWS_AS(LayeredGraph(3, loop), Error);
  const std::vector<Edge> far{{0, 3}};
  CHECK_THROWS_AS(LayeredGraph(3, far), Error);
}

TEST_CASE("density and degrees agree with counting") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto g = random_layered(12, 0.5, 0.2, seed);
    const auto m = oracle::adjacency(g, Layer::combined);
    const VertexSet a = VertexSet::interval(12, 0, 5);
    const VertexSet b = VertexSet::interval(12, 5, 12);
    std::size_t e = 0;
    for (Vertex u = 0; u < 5; ++u)
      for (Vertex v = 5; v < 12; ++v)
        e += m[u][v];
    CHECK(edges_between(g, Layer::combined, a, b) == e);
    CHECK(density(g, Layer::combined, a, b) == Density(static_cast<std::int64_t>(e), 35));
    std::size_t mindeg = 12;
    for (Vertex v = 0; v < 12; ++v) {
      std::size_t d = 0;
      for (Vertex u = 0; u < 12; ++u)
        d += m[v][u];
      mindeg = std::min(mindeg, d);
      CHECK(g.degree(v, Layer::combined) == d);
    }
    CHECK(min_degree(g, Layer::combined) == mindeg);
  }
}

TEST_CASE("density rejects empty and overlapping sets") {
  LayeredGraph g(4, std::vector<Edge>{{0, 1}});
  CHECK_THROWS_AS(density(g, Layer::gamma, VertexSet(4), VertexSet(4, {1})), Error);
  try {
    density(g, Layer::gamma, VertexSet(4, {0, 1}), VertexSet(4, {1, 2}));
    FAIL("expected an error");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::disjointness_violation);
  }
}

TEST_CASE("tuple algebra") {
  const VertexTuple t{4, 1, 7, 3, 9};
  CHECK(rev(rev(t)) == t);
  for (std::size_t i = 0; i <= t.size(); ++i)
    CHECK(concat(prefix(t, i), suffix_from(t, i + 1)) == t);
  CHECK(suffix_from(t, 6).empty());
  CHECK(subtract(t, VertexSet(10, {1, 9})) == VertexTuple{4, 7, 3});

  SetTuple s{VertexSet(6, {0, 1}), VertexSet(6, {2, 3}), VertexSet(6, {1, 4})};
  const auto cut = subtract(s, VertexSet(6, {1}));
  CHECK(cut[0] == VertexSet(6, {0}));
  CHECK(cut[2] == VertexSet(6, {4}));
  CHECK(rev(rev(s)) == s);
}

TEST_CASE("vertex sets refuse mixed universes") {
  VertexSet a(4), b(5);
  CHECK_THROWS_AS(a |= b, Error);
}

TEST_CASE("edge-list text round trip") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto g = random_layered(10, 0.4, 0.3, seed);
    std::stringstream buf;
    write_edge_list(buf, g);
    const auto h = read_edge_list(buf);
    CHECK(h.order() == g.order());
    CHECK(h.edges(Layer::gamma) == g.edges(Layer::gamma));
    CHECK(h.edges(Layer::random) == g.edges(Layer::random));
  }
}

TEST_CASE("edge-list parse errors carry the line") {
  std::istringstream in("n 4\n0 1 g\n0 1 g\n");
  try {
    read_edge_list(in);
    FAIL("expected a parse error");
  } catch (const ParseError &e) {
    CHECK(e.line() == 3);
  }
  std::istringstream bad("n 3\n0 x g\n");
  CHECK_THROWS_AS(read_edge_list(bad), ParseError);
}

TEST_CASE("key=value files") {
  std::istringstream in("# header\n a = 1 \n\nb=two\n");
  const auto kv = read_key_values(in);
  CHECK(kv.at("a") == "1");
  CHECK(kv.at("b") == "two");
  std::istringstream dup("a=1\na=2\n");
  CHECK_THROWS_AS(read_key_values(dup), ParseError);
}

TEST_CASE("format_double round trips") {
  for (double x : {0.1, 1.0 / 3.0, 40.0 / 72.0, 1e-12, 12345.678})
    CHECK(std::stod(format_double(x)) == x);
  CHECK(format_double(0.25) == "0.25");
}
