// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include "oracle.hpp"

#include "powerlab/error.hpp"
#include "powerlab/experiments.hpp"
#include "powerlab/generators.hpp"
#include "powerlab/pipeline.hpp"
#include "powerlab/power_path.hpp"
#include "powerlab/regularity.hpp"
#include "powerlab/rng.hpp"
#include "powerlab/search.hpp"

#include <fmt/core.h>

#include <chrono>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

using namespace powerlab;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Verdict sequences of criteria 1, 8 and 9, compared by criterion 10.
struct Sequences {
  std::vector<std::string> oracle_runs;
  std::vector<std::string> pipeline_runs;
  std::vector<std::string> mc_runs;
};

std::vector<std::uint32_t> members(const VertexSet &s) { return s.to_vector(); }

LayeredGraph complete_graph(std::size_t n) {
  std::vector<Edge> edges;
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v)
      edges.push_back({u, v});
  return LayeredGraph(n, edges);
}

std::vector<std::string> criterion1_runs(std::size_t &disagreements) {
  std::vector<std::string> runs;
  disagreements = 0;
  const double qs[] = {0.3, 0.5, 0.8};
  for (std::uint64_t i = 0; i < 200; ++i) {
    const std::size_t n = 6 + i % 4;
    LayeredGraph g;
    if (i % 4 == 3) {
      // blown-up clique with a sparse random layer on top
      const std::size_t parts = n % 3 == 0 ? 3 : 2;
      const auto c = gen_blowup(complete_graph(parts), n / parts);
      g = perturb(c.graph, 0.4, derive_seed(1001, i));
    } else {
      g = LayeredGraph(n, gen_gnp(n, qs[i % 3], derive_seed(1000, i)));
    }
    for (int r : {2, 3}) {
      const auto res = find_power_ham_cycle(g, r);
      const bool truth = oracle_contains_power_ham_cycle(g, r);
      bool agree = res.verdict != Verdict::budget_exceeded &&
                   (res.verdict == Verdict::found) == truth;
      if (res.verdict == Verdict::found)
        agree = agree && is_power_hamilton_cycle(g, res.order, r);
      if (!agree)
        ++disagreements;
      runs.push_back(to_string(res.verdict));
    }
  }
  return runs;
}

Outcome criterion1(Sequences &seq) {
  std::size_t bad = 0;
  seq.oracle_runs = criterion1_runs(bad);
  return {bad == 0, fmt::format("{} decisions, {} disagreements", seq.oracle_runs.size(), bad)};
}

Outcome criterion2() {
  std::size_t found = 0, not_found = 0, bad = 0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const auto g = gen_dirac_random(9, 6, derive_seed(2000, i), 100);
    if (min_degree(g, Layer::combined) < 6)
      ++bad;
    const auto res = find_power_ham_cycle(g, 2);
    switch (res.verdict) {
    case Verdict::found:
      ++found;
      if (!is_power_hamilton_cycle(g, res.order, 2) ||
          !oracle::power_cycle(oracle::adjacency(g, Layer::combined), res.order, 2))
        ++bad;
      break;
    case Verdict::not_found:
      ++not_found;
      if (oracle_contains_power_ham_cycle(g, 2))
        ++bad;
      break;
    case Verdict::budget_exceeded:
      ++bad;
      break;
    }
  }
  return {bad == 0, fmt::format("containment rate {}/50, {} not found, {} bad", found, not_found, bad)};
}

Outcome criterion3() {
  std::size_t bad = 0, runs = 0;
  for (int k : {1, 2})
    for (std::size_t n : {6u, 9u, 12u}) {
      const auto sizes = balanced_sizes(n, static_cast<std::size_t>(k + 1));
      const auto c = gen_complete_multipartite(sizes);
      if (c.graph.edge_count(Layer::random) != 0)
        ++bad;
      for (int rep = 0; rep < 2; ++rep) {
        ++runs;
        if (find_power_ham_cycle(c.graph, 2 * k + 1).verdict != Verdict::not_found)
          ++bad;
      }
    }
  return {bad == 0, fmt::format("{} runs, {} not returning not_found", runs, bad)};
}

Outcome criterion4() {
  const auto c = gen_xy_construction(21, 0.01);
  const VertexSet &x = c.parts[0];
  const VertexSet &y = c.parts[1];
  const int q = 7;
  const auto res = max_clique_packing(c.graph, q);
  // A 7-clique holds at most one vertex of the independent set X, so a
  // packing of m cliques needs 6m vertices of Y.
  const std::size_t bound = std::min(x.size() + y.size() / q, y.size() / (q - 1));
  const auto m = oracle::adjacency(c.graph, Layer::combined);
  bool ok = res.cliques.size() == bound;
  VertexSet covered(21);
  for (const auto &cl : res.cliques) {
    ok = ok && cl.size() == static_cast<std::size_t>(q) && oracle::is_clique(m, cl);
    for (Vertex v : cl) {
      ok = ok && !covered.contains(v);
      covered.insert(v);
    }
  }
  ok = ok && res.uncovered == VertexSet::full(21) - covered;
  const std::size_t hit = (res.uncovered & x).size();
  ok = ok && hit >= 1;
  return {ok, fmt::format("|X| = {}, packing {} (bound {}), uncovered X = {}", x.size(),
                          res.cliques.size(), bound, hit)};
}

Outcome criterion5() {
  const double eps = 0.3;
  std::size_t detected = 0;
  for (std::uint64_t i = 0; i < 10; ++i) {
    // Sparse background with a complete 4 x 4 block planted at random spots.
    Rng rng(derive_seed(5000, i));
    std::vector<Edge> edges;
    for (const auto &e : gen_gnp(24, 0.1, derive_seed(5001, i)))
      if ((e.u < 12) != (e.v < 12))
        edges.push_back(e);
    std::vector<Vertex> a(12), b(12);
    for (Vertex v = 0; v < 12; ++v) {
      a[v] = v;
      b[v] = v + 12;
    }
    rng.shuffle(std::span<Vertex>(a));
    rng.shuffle(std::span<Vertex>(b));
    for (int s = 0; s < 4; ++s)
      for (int t = 0; t < 4; ++t)
        edges.push_back({std::min(a[s], b[t]), std::max(a[s], b[t])});
    const LayeredGraph g(24, edges);
    const auto v1 = VertexSet::interval(24, 0, 12), v2 = VertexSet::interval(24, 12, 24);
    const auto rep = is_eps_regular_exact(g, Layer::combined, v1, v2, eps);
    if (rep.verdict != RegularityVerdict::irregular || !rep.witness)
      continue;
    const auto m = oracle::adjacency(g, Layer::combined);
    const auto &[u1, u2] = *rep.witness;
    const double dev = std::abs(oracle::density(m, members(u1), members(u2)) -
                                oracle::density(m, members(v1), members(v2)));
    if (u1.is_subset_of(v1) && u2.is_subset_of(v2) && u1.size() >= size_floor(eps, 12) &&
        u2.size() >= size_floor(eps, 12) && dev > eps)
      ++detected;
  }
  std::size_t regular = 0;
  for (double e : {0.1, 0.3}) {
    const auto c = gen_complete_multipartite(std::vector<std::size_t>{12, 12});
    if (is_eps_regular_exact(c.graph, Layer::gamma, c.parts[0], c.parts[1], e).verdict ==
        RegularityVerdict::regular)
      ++regular;
  }
  return {detected == 10 && regular == 2,
          fmt::format("planted detected {}/10, complete bipartite regular {}/2", detected, regular)};
}

Outcome criterion6() {
  const LayeredGraph tri(3, std::vector<Edge>{{0, 1}, {1, 2}, {0, 2}});
  const LayeredGraph path(3, std::vector<Edge>{{0, 1}, {1, 2}});
  bool ok = true;
  std::string detail;
  for (const auto *h : {&tri, &path}) {
    const auto c = gen_blowup(*h, 8);
    const std::uint64_t expected = 8ull * 8 * 8; // every density is 1
    const auto count = count_embeddings(*h, c.graph, Layer::gamma, c.parts);
    ok = ok && count == expected;
    detail += fmt::format("complete {} ", count);
  }
  std::size_t inside = 0, total = 0;
  for (std::uint64_t i = 0; i < 10; ++i)
    for (const auto *h : {&tri, &path}) {
      // three classes of 8 with G(., 1/2) between them
      std::vector<Edge> edges;
      for (const auto &e : gen_gnp(24, 0.5, derive_seed(6000, i)))
        if (e.u / 8 != e.v / 8)
          edges.push_back(e);
      const LayeredGraph g(24, edges);
      const std::vector<VertexSet> sigma{VertexSet::interval(24, 0, 8), VertexSet::interval(24, 8, 16),
                                         VertexSet::interval(24, 16, 24)};
      const auto count = static_cast<double>(count_embeddings(*h, g, Layer::gamma, sigma));
      const auto [lo, hi] = counting_lemma_band(*h, g, Layer::gamma, sigma, 0.2);
      const auto exact = oracle::embeddings(oracle::adjacency(*h, Layer::gamma),
                                            oracle::adjacency(g, Layer::gamma),
                                            {members(sigma[0]), members(sigma[1]), members(sigma[2])});
      ++total;
      if (count >= lo && count <= hi && static_cast<double>(exact) == count)
        ++inside;
    }
  ok = ok && inside == total;
  return {ok, detail + fmt::format("; half density inside band {}/{}", inside, total)};
}

Outcome criterion7() {
  std::size_t sound = 0, built = 0;
  std::string errors;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const std::size_t xs = 1 + i % 6;
    const auto c = gen_blowup(complete_graph(4), 40);
    const auto g = perturb(c.graph, 0.5, derive_seed(7000, i));
    VertexSet x(160);
    auto pool = c.parts[0].to_vector();
    Rng rng(derive_seed(7001, i));
    rng.shuffle(std::span<Vertex>(pool));
    for (std::size_t j = 0; j < xs; ++j)
      x.insert(pool[j]);
    try {
      const auto res = build_absorber_local(g, 1, x, SetTuple{c.parts[2], c.parts[3]}, c.parts[1],
                                            VertexSet(160), 0.5, PipelineParams{}, derive_seed(7002, i));
      ++built;
      if (res.gadget.absorbable == x && verify_absorbing(g, res.gadget, VerifyMode::certificate))
        ++sound;
    } catch (const Error &e) {
      errors += fmt::format(" [{}: {}]", i, e.what());
    }
  }
  return {sound == 20, fmt::format("built {}/20, verified {}/20{}", built, sound, errors)};
}

std::vector<std::string> criterion8_runs(std::size_t &success, std::size_t &valid,
                                          std::size_t &tagged) {
  std::vector<std::string> runs;
  success = valid = tagged = 0;
  for (std::uint64_t i = 0; i < 10; ++i) {
    const std::size_t n = 48 + 12 * (i % 3);
    const auto c = gen_blowup(complete_graph(3), n / 3);
    const auto g = perturb(c.graph, 40.0 / static_cast<double>(n), derive_seed(8000, i));
    // Each part splits into two clusters of n/6 <= 12 vertices.
    std::vector<VertexSet> clusters;
    for (const auto &part : c.parts) {
      const auto vs = part.to_vector();
      VertexSet lo(n), hi(n);
      for (std::size_t j = 0; j < vs.size(); ++j)
        (j < vs.size() / 2 ? lo : hi).insert(vs[j]);
      clusters.push_back(lo);
      clusters.push_back(hi);
    }
    const auto part = partition_from_classes(n, clusters);
    const auto res = full_pipeline(g, 1, part, 0.1, PipelineParams{}, derive_seed(8001, i));
    if (res.success) {
      ++success;
      if (is_power_hamilton_cycle(g, res.order, 3))
        ++valid;
      runs.push_back(fmt::format("found {:016x}", order_digest(res.order)));
    } else {
      if (!res.failed_stage.empty())
        ++tagged;
      runs.push_back("failed_at:" + res.failed_stage + " " + res.failure);
    }
  }
  return runs;
}

Outcome criterion8(Sequences &seq) {
  std::size_t success = 0, valid = 0, tagged = 0;
  seq.pipeline_runs = criterion8_runs(success, valid, tagged);
  std::string stages;
  for (const auto &r : seq.pipeline_runs)
    if (r.rfind("failed_at:", 0) == 0)
      stages += " [" + r.substr(10) + "]";
  const bool ok = success >= 8 && valid == success && tagged == 10 - success;
  return {ok, fmt::format("{}/10 succeeded, {} validated, {} failures tagged{}", success, valid,
                          tagged, stages)};
}

McResult criterion9_run() {
  ModelConfig m;
  m.kind = ModelKind::complete_multipartite;
  m.n = 12;
  m.k = 1;
  m.class_sizes = {6, 6};
  m.seed = 9000;
  const std::vector<double> grid{0, 1, 2, 4, 8, 16};
  return mc_threshold(m, 1, grid, 200, 9001, Method::exact_search, SearchBudget{}, {}, 0.01, 0);
}

Outcome criterion9(Sequences &seq) {
  const auto res = criterion9_run();
  seq.mc_runs.clear();
  for (const auto &r : res.records)
    seq.mc_runs.push_back(r.verdict);
  const auto &rows = res.table.rows;
  bool ok = rows.size() == 6;
  std::string freq;
  for (const auto &r : rows) {
    ok = ok && r.valid();
    freq += fmt::format(" {}:{:.3f}", r.C, r.frequency());
  }
  // p = min(1, 16 / 12) = 1 in the last row
  ok = ok && rows.front().frequency() == 0.0 && rows.back().frequency() == 1.0;
  ok = ok && rows.back().frequency() >= rows[1].frequency();
  for (std::size_t i = 1; i < rows.size(); ++i)
    ok = ok && rows[i - 1].frequency() - rows[i].frequency() <= two_proportion_bound(rows[i - 1], rows[i]);
  return {ok, "frequency" + freq};
}

Outcome criterion10(const Sequences &seq) {
  std::size_t bad = 0;
  std::size_t ignored = 0, s = 0, v = 0, t = 0;
  if (criterion1_runs(ignored) != seq.oracle_runs)
    ++bad;
  if (criterion8_runs(s, v, t) != seq.pipeline_runs)
    ++bad;
  const auto mc = criterion9_run();
  std::vector<std::string> verdicts;
  for (const auto &r : mc.records)
    verdicts.push_back(r.verdict);
  if (verdicts != seq.mc_runs)
    ++bad;
  return {bad == 0, fmt::format("{} of 3 reruns differ", bad)};
}

} // namespace

int main() {
  Sequences seq;
  struct Criterion {
    int id;
    const char *name;
    double limit; // seconds
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "oracle equivalence", 300, [&] { return criterion1(seq); }},
      {2, "dense spot check", 300, criterion2},
      {3, "multipartite obstruction", 60, criterion3},
      {4, "X/Y packing obstruction", 120, criterion4},
      {5, "regularity exactness", 180, criterion5},
      {6, "counting band", 60, criterion6},
      {7, "absorber soundness", 300, criterion7},
      {8, "end-to-end pipeline", 900, [&] { return criterion8(seq); }},
      {9, "monte carlo monotonicity", 600, [&] { return criterion9(seq); }},
      {10, "determinism", 1800, [&] { return criterion10(seq); }},
  };
  int failed = 0;
  for (const auto &c : criteria) {
    const auto start = Clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception &e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    const bool in_time = secs <= c.limit;
    const bool pass = out.pass && in_time;
    if (!pass)
      ++failed;
    fmt::print("{} criterion {:>2} ({}): {} | {:.1f}s of {:.0f}s{}\n", pass ? "PASS" : "FAIL", c.id,
               c.name, out.detail, secs, c.limit, in_time ? "" : " (over time)");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
