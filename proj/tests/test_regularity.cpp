#include "doctest.h"
#include "oracle.hpp"

#include "powerlab/error.hpp"
#include "powerlab/generators.hpp"
#include "powerlab/regularity.hpp"

#include <sstream>

using namespace powerlab;

namespace {

std::vector<std::uint32_t> members(const VertexSet &s) { return s.to_vector(); }

LayeredGraph bipartite_random(std::size_t a, std::size_t b, double p, std::uint64_t seed) {
  std::vector<Edge> edges;
  const auto all = gen_gnp(a + b, p, seed);
  for (const auto &e : all)
    if ((e.u < a) != (e.v < a))
      edges.push_back(e);
  return LayeredGraph(a + b, edges);
}

} // namespace

TEST_CASE("size floor") {
  CHECK(size_floor(0.3, 12) == 4);
  CHECK(size_floor(0.25, 12) == 3);
  CHECK(size_floor(0.01, 5) == 1);
  CHECK(size_floor(1.0, 5) == 5);
}

TEST_CASE("exact verdict matches exhaustive subset enumeration") {
  int irregular = 0;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const std::size_t a = 4 + seed % 3, b = 5 + seed % 2;
    const auto g = bipartite_random(a, b, 0.5, seed);
    const VertexSet v1 = VertexSet::interval(a + b, 0, static_cast<Vertex>(a));
    const VertexSet v2 = VertexSet::interval(a + b, static_cast<Vertex>(a), static_cast<Vertex>(a + b));
    const auto m = oracle::adjacency(g, Layer::combined);
    for (double eps : {0.2, 0.35, 0.5}) {
      if (edges_between(g, Layer::combined, v1, v2) == 0)
        continue;
      const double dev = oracle::max_deviation(m, members(v1), members(v2), size_floor(eps, a),
                                               size_floor(eps, b));
      const auto rep = is_eps_regular_exact(g, Layer::combined, v1, v2, eps);
      CHECK(rep.deviation == doctest::Approx(dev));
      const bool expect_regular = dev <= eps + 1e-12;
      CHECK((rep.verdict == RegularityVerdict::regular) == expect_regular);
      if (!expect_regular) {
        ++irregular;
        REQUIRE(rep.witness.has_value());
        const auto &[u1, u2] = *rep.witness;
        CHECK(u1.is_subset_of(v1));
        CHECK(u2.is_subset_of(v2));
        CHECK(u1.size() >= size_floor(eps, a));
        CHECK(u2.size() >= size_floor(eps, b));
        CHECK(std::abs(oracle::density(m, members(u1), members(u2)) -
                       oracle::density(m, members(v1), members(v2))) > eps);
      }
    }
  }
  CHECK(irregular > 0);
}

TEST_CASE("complete bipartite pairs are regular for every eps") {
  const auto c = gen_complete_multipartite(std::vector<std::size_t>{8, 8});
  for (double eps : {0.05, 0.1, 0.3, 1.0}) {
    const auto rep = is_eps_regular_exact(c.graph, Layer::gamma, c.parts[0], c.parts[1], eps);
    CHECK(rep.verdict == RegularityVerdict::regular);
    CHECK(rep.d == Density(1));
  }
}

TEST_CASE("regularity input checks") {
  const auto c = gen_complete_multipartite(std::vector<std::size_t>{3, 3});
  auto kind_of = [](auto &&f) {
    try {
      f();
    } catch (const Error &e) {
      return e.kind();
    }
    return ErrorKind::invalid_argument;
  };
  CHECK(kind_of([&] { is_eps_regular_exact(c.graph, Layer::gamma, VertexSet(6), c.parts[1], 0.2); }) ==
        ErrorKind::empty_set);
  CHECK(kind_of([&] { is_eps_regular_exact(c.graph, Layer::gamma, c.parts[0], c.parts[0], 0.2); }) ==
        ErrorKind::disjointness_violation);
  CHECK(kind_of([&] { is_eps_regular_exact(c.graph, Layer::gamma, c.parts[0], c.parts[1], 0.0); }) ==
        ErrorKind::range_violation);
  const auto big = gen_complete_multipartite(std::vector<std::size_t>{17, 3});
  CHECK(kind_of([&] { is_eps_regular_exact(big.graph, Layer::gamma, big.parts[0], big.parts[1], 0.2); }) ==
        ErrorKind::too_large);
}

TEST_CASE("sampled check finds planted blocks and never certifies") {
  const std::size_t a = 30;
  std::vector<Edge> edges;
  for (Vertex u = 0; u < 15; ++u)
    for (Vertex v = 30; v < 45; ++v)
      edges.push_back({u, v});
  const LayeredGraph g(60, edges);
  const VertexSet v1 = VertexSet::interval(60, 0, 30), v2 = VertexSet::interval(60, 30, 60);
  const auto rep = is_eps_regular_sampled(g, Layer::gamma, v1, v2, 0.3, 500, 4);
  CHECK(rep.verdict == RegularityVerdict::irregular);
  REQUIRE(rep.witness.has_value());
  CHECK(rep.witness->first.size() >= size_floor(0.3, a));
  const auto c = gen_complete_multipartite(std::vector<std::size_t>{30, 30});
  const auto full = is_eps_regular_sampled(c.graph, Layer::gamma, c.parts[0], c.parts[1], 0.3, 200, 1);
  CHECK(full.verdict == RegularityVerdict::undecided);
  CHECK_THROWS_AS(is_eps_regular_sampled(g, Layer::gamma, v1, v2, 0.3, 0, 1), Error);
}

TEST_CASE("slice inheritance parameters") {
  const auto [e, d] = slice_regularity(0.1, 0.5, 0.4);
  CHECK(e == doctest::Approx(0.2));
  CHECK(d == doctest::Approx(0.3));
  CHECK_THROWS_AS(slice_regularity(0.3, 0.2, 0.5), Error);
  CHECK_THROWS_AS(slice_regularity(0.1, 0.6, 0.5), Error);
}

TEST_CASE("slices of a complete pair stay regular and dense") {
  const auto c = gen_complete_multipartite(std::vector<std::size_t>{10, 10});
  const auto [e, d] = slice_regularity(0.1, 0.5, 1.0);
  const VertexSet w1 = VertexSet::interval(20, 0, 5), w2 = VertexSet::interval(20, 10, 15);
  const auto rep = is_eps_regular_exact(c.graph, Layer::gamma, w1, w2, e);
  CHECK(rep.verdict == RegularityVerdict::regular);
  CHECK(boost::rational_cast<double>(rep.d) >= d);
}

TEST_CASE("partition text round trip and validation") {
  Partition p{VertexSet(7, {6}), {VertexSet(7, {0, 1, 2}), VertexSet(7, {3, 4, 5})}};
  p.validate();
  std::stringstream buf;
  write_partition(buf, p);
  const auto q = read_partition(buf, 7);
  CHECK(q.exceptional == p.exceptional);
  CHECK(q.classes == p.classes);

  Partition overlap{VertexSet(4), {VertexSet(4, {0, 1}), VertexSet(4, {1, 2, 3})}};
  CHECK_THROWS_AS(overlap.validate(), Error);
  Partition gap{VertexSet(4), {VertexSet(4, {0, 1})}};
  CHECK_THROWS_AS(gap.validate(), Error);

  std::istringstream bad("class 1: 0 1\nclass 1: 2 3\n");
  try {
    read_partition(bad, 4);
    FAIL("expected a parse error");
  } catch (const ParseError &e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("reduced graph of a blown-up triangle") {
  LayeredGraph tri(3, std::vector<Edge>{{0, 1}, {1, 2}, {0, 2}});
  const auto c = gen_blowup(tri, 6);
  const auto p = partition_from_classes(18, c.parts);
  const auto r = reduced_graph(c.graph, Layer::gamma, p, 0.2, 0.3);
  CHECK(r.graph.order() == 3);
  CHECK(r.graph.edge_count(Layer::combined) == 3);
  CHECK(r.undecided.empty());
  const auto form = check_degree_form(c.graph, Layer::gamma, p, 0.2, 0.3);
  CHECK(form.ok());
  CHECK(reduced_min_degree_inherits(c.graph, Layer::gamma, p, 0.2, 0.3, 1, 0.1));
  CHECK_FALSE(reduced_min_degree_inherits(c.graph, Layer::gamma, p, 0.2, 0.3, 2, 0.1));
}

TEST_CASE("degree form flags unequal classes and dense insides") {
  std::vector<Edge> edges{{0, 1}};
  for (Vertex u = 0; u < 3; ++u)
    for (Vertex v = 3; v < 8; ++v)
      edges.push_back({u, v});
  const LayeredGraph g(8, edges);
  const auto p = partition_from_classes(8, {VertexSet(8, {0, 1, 2}), VertexSet(8, {3, 4, 5, 6, 7})});
  const auto form = check_degree_form(g, Layer::gamma, p, 0.2, 0.3);
  CHECK_FALSE(form.ok());
  CHECK_FALSE(form.equal_sizes);
  CHECK_FALSE(form.classes_empty);
  CHECK_FALSE(form.violations.empty());
}

TEST_CASE("embedding counts match enumeration") {
  LayeredGraph path(3, std::vector<Edge>{{0, 1}, {1, 2}});
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const LayeredGraph g(15, gen_gnp(15, 0.5, seed));
    const std::vector<VertexSet> sigma{VertexSet::interval(15, 0, 5), VertexSet::interval(15, 5, 10),
                                       VertexSet::interval(15, 10, 15)};
    const auto m = oracle::adjacency(g, Layer::combined);
    const auto h = oracle::adjacency(path, Layer::gamma);
    std::vector<std::vector<std::uint32_t>> s;
    for (const auto &set : sigma)
      s.push_back(set.to_vector());
    CHECK(count_embeddings(path, g, Layer::combined, sigma) == oracle::embeddings(h, m, s));
  }
  CHECK_THROWS_AS(count_embeddings(LayeredGraph(9), LayeredGraph(9), Layer::gamma,
                                   std::vector<VertexSet>(9, VertexSet(9))),
                  Error);
}

TEST_CASE("counting band brackets the exact count of a complete blow-up") {
  LayeredGraph tri(3, std::vector<Edge>{{0, 1}, {1, 2}, {0, 2}});
  const auto c = gen_blowup(tri, 4);
  const auto [lo, hi] = counting_lemma_band(tri, c.graph, Layer::gamma, c.parts, 0.0);
  CHECK(lo == doctest::Approx(64.0));
  CHECK(hi == doctest::Approx(64.0));
  CHECK(count_embeddings(tri, c.graph, Layer::gamma, c.parts) == 64);
}
