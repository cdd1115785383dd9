#include "doctest.h"
#include "oracle.hpp"

#include "powerlab/error.hpp"
#include "powerlab/generators.hpp"
#include "powerlab/power_path.hpp"
#include "powerlab/rng.hpp"

using namespace powerlab;

namespace {

LayeredGraph complete(std::size_t n) {
  return LayeredGraph(n, gen_gnp(n, 1.0, 0));
}

} // namespace

TEST_CASE("power path predicate agrees with a pairwise scan") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const LayeredGraph g(9, gen_gnp(9, 0.8, seed), gen_gnp(9, 0.3, seed + 1));
    const auto m = oracle::adjacency(g, Layer::combined);
    Rng rng(seed);
    VertexTuple seq{0, 1, 2, 3, 4, 5, 6, 7, 8};
    rng.shuffle(std::span<Vertex>(seq));
    seq.resize(3 + rng.below(7));
    for (int r = 1; r <= 4; ++r)
      CHECK(is_power_path(g, seq, r) == oracle::power_path(m, seq, r));
  }
}

TEST_CASE("repeated vertices are never a power path") {
  const auto g = complete(5);
  CHECK_FALSE(is_power_path(g, VertexTuple{0, 1, 0}, 1));
  CHECK_THROWS_AS(PowerPath(VertexTuple{0, 1, 0}, 1), Error);
}

TEST_CASE("endpoints, skeleton and required pairs") {
  const PowerPath p(VertexTuple{5, 4, 3, 2, 1, 0}, 3);
  const auto [s, t] = endpoints(p);
  CHECK(s == VertexTuple{5, 4, 3, 2});
  CHECK(t == VertexTuple{3, 2, 1, 0});
  CHECK(skeleton(p).size() == 5);
  // pairs at distance 1..3 in a sequence of 6: 5 + 4 + 3
  CHECK(required_pairs(p).size() == 12);
  CHECK_THROWS_AS(endpoints(PowerPath(VertexTuple{0, 1}, 3)), Error);
}

TEST_CASE("concatenation glues along the shared clique") {
  const PowerPath p(VertexTuple{0, 1, 2, 3, 4}, 2);
  const PowerPath q(VertexTuple{2, 3, 4, 5, 6}, 2);
  CHECK(concat(p, q).vertices() == VertexTuple{0, 1, 2, 3, 4, 5, 6});
  const PowerPath bad(VertexTuple{3, 2, 4, 5}, 2);
  try {
    concat(p, bad);
    FAIL("expected an error");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::endpoint_mismatch);
  }
  const PowerPath overlap(VertexTuple{2, 3, 4, 0}, 2);
  try {
    concat(p, overlap);
    FAIL("expected an error");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::overlap_violation);
  }
}

TEST_CASE("bicanonical membership") {
  const SetTuple sets{VertexSet(6, {0, 1}), VertexSet(6, {2, 3}), VertexSet(6, {4, 5})};
  CHECK(is_bicanonical(PowerPath(VertexTuple{1, 0, 3, 2, 4, 5}, 3), sets));
  CHECK_FALSE(is_bicanonical(PowerPath(VertexTuple{0, 2, 1, 3, 4, 5}, 3), sets));
  CHECK_THROWS_AS(is_bicanonical(PowerPath(VertexTuple{0, 1}, 3), sets), Error);
}

TEST_CASE("hamilton cycle power predicate") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const LayeredGraph g(8, gen_gnp(8, 0.85, seed));
    const auto m = oracle::adjacency(g, Layer::combined);
    Rng rng(seed);
    VertexTuple order{0, 1, 2, 3, 4, 5, 6, 7};
    rng.shuffle(std::span<Vertex>(order));
    for (int r = 1; r <= 3; ++r)
      CHECK(is_power_hamilton_cycle(g, order, r) == oracle::power_cycle(m, order, r));
  }
  const auto g = complete(4);
  CHECK_THROWS_AS(is_power_hamilton_cycle(g, VertexTuple{0, 1, 1, 2}, 1), Error);
}

TEST_CASE("text form round trip") {
  const PowerPath p(VertexTuple{3, 1, 4, 0, 2}, 3);
  CHECK(parse_power_path(to_string(p)) == p);
  CHECK(rev(rev(p)) == p);
  CHECK_THROWS_AS(parse_power_path("r=x 1 2"), Error);
}
