#include "doctest.h"
#include "oracle.hpp"

#include "powerlab/error.hpp"
#include "powerlab/generators.hpp"
#include "powerlab/pipeline.hpp"
#include "powerlab/regularity.hpp"

#include <functional>
#include <set>
#include <sstream>

using namespace powerlab;

namespace {

LayeredGraph complete(std::size_t t) {
  return LayeredGraph(t, gen_gnp(t, 1.0, 0));
}

ErrorKind kind_of(const std::function<void()> &f) {
  try {
    f();
  } catch (const Error &e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::invalid_argument;
}

// Covering tests need a leftover band wider than the spread of later usage
// between classes of one block, and a small lambda so few joints are needed.
PipelineParams relaxed() {
  PipelineParams p;
  p.gamma = 0.3;
  p.tol = 0.5;
  p.lambda = 0.05;
  return p;
}

// Splices every subset into the path by brute force over insertion points and
// checks the result is a power path with the original endpoints.
bool absorbs_every_subset(const LayeredGraph &g, const AbsorberGadget &gadget, int r) {
  const auto m = oracle::adjacency(g, Layer::combined);
  const auto xs = gadget.absorbable.to_vector();
  const std::size_t n = g.order();
  const auto &base = gadget.path.vertices();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << xs.size()); ++mask) {
    VertexSet chosen(n);
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (mask >> i & 1)
        chosen.insert(xs[i]);
    const auto path = absorb(g, gadget, chosen);
    const auto &v = path.vertices();
    if (!oracle::power_path(m, v, r))
      return false;
    if (to_set(n, v) != (gadget.path.vertex_set(n) | chosen))
      return false;
    const std::size_t w = static_cast<std::size_t>(r + 1);
    if (!std::equal(base.begin(), base.begin() + static_cast<std::ptrdiff_t>(w), v.begin()) ||
        !std::equal(base.end() - static_cast<std::ptrdiff_t>(w), base.end(),
                    v.end() - static_cast<std::ptrdiff_t>(w)))
      return false;
  }
  return true;
}

} // namespace

TEST_CASE("params key=value round trip and validation") {
  PipelineParams p;
  p.rho = 0.125;
  p.retry_limit = 3;
  p.budget.max_nodes = 1234;
  const auto back = PipelineParams::from_key_values(p.to_key_values());
  CHECK(back.to_key_values() == p.to_key_values());
  auto kv = p.to_key_values();
  kv["unrelated"] = "x";
  CHECK_NOTHROW(PipelineParams::from_key_values(kv));
  PipelineParams bad;
  bad.gamma = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = PipelineParams{};
  bad.retry_limit = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("skeleton pairs match the skeleton paths") {
  for (int k = 1; k <= 3; ++k) {
    const std::size_t len = 40;
    std::set<std::pair<std::size_t, std::size_t>> expect;
    // k + 1 paths v_{2i-1}, v_{2i}, v_{2i+2k+1}, v_{2i+2k+2}, ...
    for (std::size_t i = 1; i <= static_cast<std::size_t>(k + 1); ++i) {
      std::vector<std::size_t> walk;
      for (std::size_t a = 2 * i - 1; a <= len; a += 2 * static_cast<std::size_t>(k + 1)) {
        walk.push_back(a);
        if (a + 1 <= len)
          walk.push_back(a + 1);
      }
      for (std::size_t j = 1; j < walk.size(); ++j)
        expect.insert({walk[j], walk[j - 1]});
    }
    for (std::size_t a = 2; a <= len; ++a)
      for (std::size_t b = 1; b < a; ++b)
        CHECK(is_skeleton_pair(a, b, k) == (expect.count({a, b}) == 1));
  }
}

TEST_CASE("extendibility margins") {
  const auto c = gen_complete_multipartite(std::vector<std::size_t>{4, 4, 4, 4});
  const VertexTuple v{0, 1, 4, 5};
  const SetTuple sets{c.parts[2], c.parts[3]};
  const auto chk = is_extendible(c.graph, Layer::gamma, v, sets, 0.5);
  // v^{>=2} = (1, 4, 5) sees all of class 3; v^{>=4} = (5) sees all of class 4.
  REQUIRE(chk.margins.size() == 2);
  CHECK(chk.margins[0] == doctest::Approx(1.0));
  CHECK(chk.margins[1] == doctest::Approx(1.0));
  CHECK(chk.extendible);
  const SetTuple bad{c.parts[0], c.parts[3]};
  const auto no = is_extendible(c.graph, Layer::gamma, VertexTuple{4, 5, 8, 9}, bad, 0.5);
  CHECK(no.extendible);
  const SetTuple own{c.parts[1], c.parts[3]};
  CHECK_FALSE(is_extendible(c.graph, Layer::gamma, VertexTuple{4, 5, 8, 9}, own, 0.5).extendible);
  CHECK_FALSE(is_extendible(c.graph, Layer::gamma, v, SetTuple{VertexSet(16), c.parts[3]}, 0.5).extendible);
  CHECK(kind_of([&] { is_extendible(c.graph, Layer::gamma, v, SetTuple{c.parts[2]}, 0.5); }) ==
        ErrorKind::length_mismatch);
}

TEST_CASE("bicanonical path honours sets, layers and endpoints") {
  const auto c = gen_blowup(complete(3), 8);
  const auto g = perturb(c.graph, 0.7, 11);
  const SetTuple sets{c.parts[0], c.parts[1], c.parts[0], c.parts[1], c.parts[0], c.parts[1]};
  const auto built = build_bicanonical_path(g, 1, sets, c.parts[2], c.parts[2], 0.2, PipelineParams{}, 5);
  CHECK(built.path.size() == 12);
  CHECK(is_bicanonical(built.path, sets));
  CHECK(is_power_path(g, built.path.vertices(), 3));
  CHECK(audit_layers(g, built.path, 1).ok);
  REQUIRE(built.s_check.has_value());
  REQUIRE(built.t_check.has_value());
  CHECK(built.s_check->extendible);
  CHECK(built.t_check->extendible);
}

TEST_CASE("bicanonical path reports an impossible tuple") {
  const auto c = gen_blowup(complete(2), 4); // no random layer: no edge inside a class
  const SetTuple sets{c.parts[0], c.parts[1]};
  const auto kind = kind_of([&] {
    build_bicanonical_path(c.graph, 1, sets, VertexSet(8), VertexSet(8), 0.2, PipelineParams{}, 1);
  });
  CHECK(kind == ErrorKind::not_found);
}

TEST_CASE("connecting two cliques") {
  const auto c = gen_blowup(complete(4), 10);
  const auto g = perturb(c.graph, 0.8, 2);
  const auto a = build_bicanonical_path(g, 1, SetTuple{c.parts[0], c.parts[1]}, VertexSet(40), VertexSet(40),
                                        0.2, PipelineParams{}, 1);
  const VertexSet used_a = a.path.vertex_set(40);
  const auto b = build_bicanonical_path(g, 1, subtract(SetTuple{c.parts[0], c.parts[1]}, used_a),
                                        VertexSet(40), VertexSet(40), 0.2, PipelineParams{}, 2);
  const ConnectJob job{a.path.vertices(), b.path.vertices(),
                       SetTuple{c.parts[2], c.parts[3], c.parts[0], c.parts[1], c.parts[2], c.parts[3]}};
  const auto paths = connect_cliques(g, 1, {job}, VertexSet(40), PipelineParams{}, 3);
  REQUIRE(paths.size() == 1);
  const auto &v = paths[0].vertices();
  CHECK(v.size() == 4 + 12 + 4);
  CHECK(is_power_path(g, v, 3));
  CHECK(VertexTuple(v.begin(), v.begin() + 4) == a.path.vertices());
  CHECK(VertexTuple(v.end() - 4, v.end()) == b.path.vertices());

  ConnectJob broken = job;
  broken.s.pop_back();
  try {
    connect_cliques(g, 1, {job, broken}, VertexSet(40), PipelineParams{}, 3);
    FAIL("expected an error");
  } catch (const ConnectError &e) {
    CHECK(e.job() == 1);
    CHECK(e.kind() == ErrorKind::invalid_endpoint);
  }
}

TEST_CASE("local absorber: every subset splices in") {
  const auto c = gen_blowup(complete(4), 20);
  const auto g = perturb(c.graph, 0.5, 7);
  VertexSet x(80);
  for (Vertex v = 0; v < 3; ++v)
    x.insert(v);
  const auto res = build_absorber_local(g, 1, x, SetTuple{c.parts[2], c.parts[3]}, c.parts[1], VertexSet(80),
                                        0.5, PipelineParams{}, 3);
  const auto &gad = res.gadget;
  CHECK(gad.absorbable == x);
  CHECK(gad.slots.size() == 3);
  CHECK(verify_absorbing(g, gad));
  CHECK(absorbs_every_subset(g, gad, 3));
  const PipelineParams params;
  for (std::size_t i = 0; i < 2; ++i) {
    const double target = params.gamma * 20;
    CHECK(res.leftover[i] >= static_cast<std::size_t>(std::floor(0.9 * target)));
    CHECK(res.leftover[i] <= static_cast<std::size_t>(std::ceil(1.1 * target)));
  }
  CHECK(res.y_used <= static_cast<std::size_t>(params.lambda * 20));
  CHECK(res.s_check.extendible);
  CHECK(res.t_check.extendible);
}

TEST_CASE("local absorber search-mode verification agrees") {
  const auto c = gen_blowup(complete(4), 16);
  const auto g = perturb(c.graph, 0.6, 9);
  const VertexSet x(64, {0, 1});
  const auto res = build_absorber_local(g, 1, x, SetTuple{c.parts[2], c.parts[3]}, c.parts[1], VertexSet(64),
                                        0.5, PipelineParams{}, 1);
  CHECK(verify_absorbing(g, res.gadget, VerifyMode::search));
}

TEST_CASE("local absorber preconditions") {
  const auto c = gen_blowup(complete(4), 12);
  const auto g = perturb(c.graph, 0.5, 1);
  const VertexSet x(48, {0});
  CHECK(kind_of([&] {
          build_absorber_local(g, 1, x, SetTuple{c.parts[2], c.parts[3]}, c.parts[2], VertexSet(48), 0.5,
                               PipelineParams{}, 1);
        }) == ErrorKind::disjointness_violation);
  // An extra isolated vertex has no neighbours in any class.
  const LayeredGraph h(49, g.edges(Layer::gamma), g.edges(Layer::random));
  auto widen = [](const VertexSet &s) { return VertexSet(49, std::span<const Vertex>(s.to_vector())); };
  CHECK(kind_of([&] {
          build_absorber_local(h, 1, VertexSet(49, {48}), SetTuple{widen(c.parts[2]), widen(c.parts[3])},
                               widen(c.parts[1]), VertexSet(49), 0.5, PipelineParams{}, 1);
        }) == ErrorKind::precondition_failed);
}

TEST_CASE("gadget text round trip and tampering") {
  const auto c = gen_blowup(complete(4), 16);
  const auto g = perturb(c.graph, 0.5, 4);
  const auto res = build_absorber_local(g, 1, VertexSet(64, {0, 1}), SetTuple{c.parts[2], c.parts[3]},
                                        c.parts[1], VertexSet(64), 0.5, PipelineParams{}, 2);
  std::stringstream buf;
  write_gadget(buf, res.gadget);
  const auto back = read_gadget(buf, 64);
  CHECK(back.path == res.gadget.path);
  CHECK(back.absorbable == res.gadget.absorbable);
  CHECK(back.slots == res.gadget.slots);

  auto moved = res.gadget;
  moved.slots[0].after = 1;
  CHECK_FALSE(verify_absorbing(g, moved));
  std::istringstream junk("r=3 0 1 2 3\nabsorbable: 9\nslot: x\n");
  CHECK_THROWS_AS(read_gadget(junk, 64), Error);
}

TEST_CASE("absorbing covering on a blown-up clique") {
  const auto c = gen_blowup(complete(5), 40);
  const auto g = perturb(c.graph, 0.6, 7);
  const std::vector<VertexSet> w(c.parts.begin(), c.parts.begin() + 4);
  VertexSet x(200);
  for (Vertex v = 160; v < 165; ++v)
    x.insert(v);
  const auto params = relaxed();
  const auto res = absorbing_covering(g, 1, x, w, complete(4), 0.1, params, 1);
  CHECK(is_power_path(g, res.gadget.path.vertices(), 3));
  CHECK(res.z >= 2); // outside the first block
  for (std::size_t i = 0; i < 4; ++i) {
    const double target = params.gamma * 40;
    CHECK(res.leftover[i] >= static_cast<std::size_t>(std::floor(0.5 * target)));
    CHECK(res.leftover[i] <= static_cast<std::size_t>(std::ceil(1.5 * target)));
    CHECK(res.leftover[i] == (w[i] - res.gadget.path.vertex_set(200)).size());
  }
  CHECK(res.s_check.extendible);
  CHECK(res.t_check.extendible);
  CHECK(res.phi.size() == 5);
  CHECK(verify_absorbing(g, res.gadget));
}

TEST_CASE("absorbing covering preconditions") {
  const auto c = gen_blowup(complete(5), 8);
  const auto g = perturb(c.graph, 0.6, 7);
  const std::vector<VertexSet> w(c.parts.begin(), c.parts.begin() + 4);
  const VertexSet x(40, {32});
  const std::vector<VertexSet> three(c.parts.begin(), c.parts.begin() + 3);
  CHECK(kind_of([&] { absorbing_covering(g, 1, x, three, complete(3), 0.1, relaxed(), 1); }) ==
        ErrorKind::precondition_failed);
  std::vector<Edge> cyc{{0, 1}, {1, 2}, {2, 3}, {3, 0}};
  const LayeredGraph c4(4, cyc);
  CHECK(kind_of([&] { absorbing_covering(g, 1, x, w, c4, 0.0, relaxed(), 1); }) ==
        ErrorKind::no_common_neighbor_class);
  CHECK(kind_of([&] { absorbing_covering(g, 1, x, w, c4, 0.1, relaxed(), 1); }) ==
        ErrorKind::precondition_failed);
  const VertexSet loner(41, {40});
  const auto h = LayeredGraph(41, g.edges(Layer::gamma), g.edges(Layer::random));
  std::vector<VertexSet> w41;
  for (const auto &s : w)
    w41.push_back(VertexSet(41, std::span<const Vertex>(s.to_vector())));
  CHECK(kind_of([&] { absorbing_covering(h, 1, loner, w41, complete(4), 0.1, relaxed(), 1); }) ==
        ErrorKind::not_absorbable);
}

TEST_CASE("pipeline rejects partitions outside the degree form") {
  const LayeredGraph g(12, gen_gnp(12, 0.5, 3));
  const auto p = partition_from_classes(12, {VertexSet::interval(12, 0, 6), VertexSet::interval(12, 6, 12)});
  CHECK(kind_of([&] { full_pipeline(g, 1, p, 0.1, PipelineParams{}, 1); }) == ErrorKind::precondition_failed);
}

TEST_CASE("pipeline failures carry a stage tag") {
  const auto c = gen_blowup(complete(6), 12);
  const auto g = perturb(c.graph, 40.0 / 72.0, 5);
  const auto p = partition_from_classes(72, c.parts);
  const auto res = full_pipeline(g, 1, p, 0.1, PipelineParams{}, 1);
  if (res.success) {
    CHECK(is_power_hamilton_cycle(g, res.order, 3));
  } else {
    CHECK_FALSE(res.failed_stage.empty());
    CHECK_FALSE(res.failure.empty());
    CHECK(res.order.empty());
  }
  CHECK_FALSE(res.trace.empty());
}

TEST_CASE("pipeline truncates classes to a multiple of k + 1") {
  const auto c = gen_blowup(complete(5), 6);
  const auto g = perturb(c.graph, 0.5, 5);
  const auto res = full_pipeline(g, 1, partition_from_classes(30, c.parts), 0.1, PipelineParams{}, 1);
  bool noted = false;
  for (const auto &line : res.trace)
    noted = noted || line.rfind("truncation: 4 classes kept, |V0| = 6", 0) == 0;
  CHECK(noted);
}
