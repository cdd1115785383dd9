#include "powerlab/regularity.hpp"

#include "powerlab/error.hpp"
#include "powerlab/io.hpp"
#include "powerlab/parallel.hpp"
#include "powerlab/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace powerlab {

std::string to_string(RegularityVerdict v) {
  switch (v) {
  case RegularityVerdict::regular: return "regular";
  case RegularityVerdict::irregular: return "irregular";
  case RegularityVerdict::undecided: return "undecided";
  }
  return "unknown";
}

std::size_t size_floor(double eps, std::size_t size) {
  // Guard against eps * size landing a hair above an integer.
  const double raw = eps * static_cast<double>(size);
  auto m = static_cast<std::size_t>(std::ceil(raw - 1e-9));
  return std::clamp<std::size_t>(m, 1, std::max<std::size_t>(size, 1));
}

namespace {

void check_pair(const VertexSet &v1, const VertexSet &v2, double eps) {
  if (v1.empty() || v2.empty())
    throw Error(ErrorKind::empty_set, "regularity pair has an empty side");
  if (v1.intersects(v2))
    throw Error(ErrorKind::disjointness_violation, "regularity pair sides overlap");
  if (!(eps > 0.0 && eps <= 1.0))
    throw Error(ErrorKind::range_violation, "eps must lie in (0, 1]");
}

// Local view of a pair: a side of <= 64 vertices indexed 0..a-1 and, for each
// vertex of the other side, its neighbours on that side as a bit mask.
struct PairView {
  std::vector<Vertex> side_a;
  std::vector<Vertex> side_b;
  std::vector<std::uint64_t> rows; // per b, mask over side_a
  std::uint64_t total_edges = 0;
  bool swapped = false;
};

PairView make_view(const LayeredGraph &g, Layer layer, const VertexSet &v1,
                   const VertexSet &v2) {
  PairView view;
  view.swapped = v2.size() < v1.size();
  const VertexSet &a = view.swapped ? v2 : v1;
  const VertexSet &b = view.swapped ? v1 : v2;
  view.side_a = a.to_vector();
  view.side_b = b.to_vector();
  if (view.side_a.size() > 64)
    throw Error(ErrorKind::too_large, "pair side above 64 vertices");
  for (Vertex u : view.side_b) {
    std::uint64_t row = 0;
    for (std::size_t i = 0; i < view.side_a.size(); ++i)
      if (g.adjacent(u, view.side_a[i], layer))
        row |= std::uint64_t{1} << i;
    view.rows.push_back(row);
    view.total_edges += static_cast<std::uint64_t>(std::popcount(row));
  }
  return view;
}

struct Candidate {
  double deviation = -1.0;
  std::uint64_t mask_a = 0;
  std::vector<std::size_t> picks_b;
};

// For a fixed subset of side A, scans every admissible |U_B| with the top and
// bottom degree orders and keeps the worst deviation.
void scan_subset(const PairView &view, std::uint64_t mask, std::size_t floor_b,
                 Candidate &best) {
  const std::size_t nb = view.side_b.size();
  const std::size_t na = view.side_a.size();
  const auto ua = static_cast<std::size_t>(std::popcount(mask));
  std::vector<std::pair<int, std::size_t>> deg(nb);
  for (std::size_t j = 0; j < nb; ++j)
    deg[j] = {std::popcount(view.rows[j] & mask), j};
  std::sort(deg.begin(), deg.end());
  const double scale = static_cast<double>(na) * static_cast<double>(nb);
  const double full = static_cast<double>(view.total_edges);
  std::uint64_t low = 0;
  std::uint64_t high = 0;
  for (std::size_t m = 1; m <= nb; ++m) {
    low += static_cast<std::uint64_t>(deg[m - 1].first);
    high += static_cast<std::uint64_t>(deg[nb - m].first);
    if (m < floor_b)
      continue;
    const double denom = static_cast<double>(ua) * static_cast<double>(m) * scale;
    const double base = full * static_cast<double>(ua) * static_cast<double>(m);
    const double dev_low = std::abs(static_cast<double>(low) * scale - base) / denom;
    const double dev_high = std::abs(static_cast<double>(high) * scale - base) / denom;
    const bool use_high = dev_high > dev_low;
    const double dev = use_high ? dev_high : dev_low;
    if (dev > best.deviation) {
      best.deviation = dev;
      best.mask_a = mask;
      best.picks_b.clear();
      for (std::size_t i = 0; i < m; ++i)
        best.picks_b.push_back(use_high ? deg[nb - 1 - i].second : deg[i].second);
    }
  }
}

RegularityReport finish(const LayeredGraph &g, const PairView &view, const VertexSet &v1,
                        const VertexSet &v2, double eps, const Candidate &best,
                        bool exhaustive) {
  RegularityReport rep;
  rep.v1 = v1;
  rep.v2 = v2;
  rep.eps = eps;
  rep.d = Density(static_cast<std::int64_t>(view.total_edges),
                  static_cast<std::int64_t>(v1.size() * v2.size()));
  rep.deviation = std::max(best.deviation, 0.0);
  if (best.deviation > eps) {
    VertexSet ua(g.order());
    VertexSet ub(g.order());
    for (std::uint64_t m = best.mask_a; m; m &= m - 1)
      ua.insert(view.side_a[static_cast<std::size_t>(std::countr_zero(m))]);
    for (auto j : best.picks_b)
      ub.insert(view.side_b[j]);
    rep.verdict = RegularityVerdict::irregular;
    rep.witness = view.swapped ? std::make_pair(ub, ua) : std::make_pair(ua, ub);
  } else {
    rep.verdict = exhaustive ? RegularityVerdict::regular : RegularityVerdict::undecided;
  }
  return rep;
}

} // namespace

RegularityReport is_eps_regular_exact(const LayeredGraph &g, Layer layer, const VertexSet &v1,
                                      const VertexSet &v2, double eps, std::size_t cap) {
  check_pair(v1, v2, eps);
  if (v1.size() > cap || v2.size() > cap)
    throw Error(ErrorKind::too_large, "pair side above the exact cap of " + std::to_string(cap));
  const PairView view = make_view(g, layer, v1, v2);
  const std::size_t na = view.side_a.size();
  const std::size_t floor_a = size_floor(eps, na);
  const std::size_t floor_b = size_floor(eps, view.side_b.size());
  Candidate best;
  const std::uint64_t limit = std::uint64_t{1} << na;
  for (std::uint64_t mask = 1; mask < limit; ++mask)
    if (static_cast<std::size_t>(std::popcount(mask)) >= floor_a)
      scan_subset(view, mask, floor_b, best);
  return finish(g, view, v1, v2, eps, best, true);
}

RegularityReport is_eps_regular_sampled(const LayeredGraph &g, Layer layer,
                                        const VertexSet &v1, const VertexSet &v2, double eps,
                                        std::size_t samples, std::uint64_t seed) {
  check_pair(v1, v2, eps);
  if (samples == 0)
    throw Error(ErrorKind::invalid_argument, "samples must be at least 1");
  const PairView view = make_view(g, layer, v1, v2);
  const std::size_t na = view.side_a.size();
  const std::size_t floor_a = size_floor(eps, na);
  const std::size_t floor_b = size_floor(eps, view.side_b.size());
  Rng rng(seed);
  std::vector<std::size_t> idx(na);
  Candidate best;
  for (std::size_t s = 0; s < samples; ++s) {
    std::iota(idx.begin(), idx.end(), 0);
    rng.shuffle(std::span<std::size_t>(idx));
    std::uint64_t mask = 0;
    for (std::size_t i = 0; i < floor_a; ++i)
      mask |= std::uint64_t{1} << idx[i];
    Candidate local;
    scan_subset(view, mask, floor_b, local);
    if (local.deviation > best.deviation)
      best = local;
    if (best.deviation > eps)
      break;
  }
  return finish(g, view, v1, v2, eps, best, false);
}

std::pair<double, double> slice_regularity(double eps, double delta, double d) {
  if (!(eps > 0.0 && eps <= delta && delta <= 0.5))
    throw Error(ErrorKind::range_violation, "need 0 < eps <= delta <= 1/2");
  return {eps / delta, d - eps};
}

void Partition::validate() const {
  const std::size_t n = universe();
  VertexSet seen = exceptional;
  for (const auto &cls : classes) {
    if (cls.universe() != n)
      throw Error(ErrorKind::invalid_argument, "partition class over the wrong universe");
    if (cls.intersects(seen))
      throw Error(ErrorKind::disjointness_violation, "partition parts overlap");
    seen |= cls;
  }
  if (seen.size() != n)
    throw Error(ErrorKind::invalid_argument, "partition does not cover every vertex");
}

Partition partition_from_classes(std::size_t n, std::vector<VertexSet> classes) {
  Partition p{VertexSet(n), std::move(classes)};
  p.validate();
  return p;
}

namespace {

void write_members(std::ostream &out, const VertexSet &s) {
  s.for_each([&](Vertex v) { out << ' ' << v; });
  out << '\n';
}

} // namespace

void write_partition(std::ostream &out, const Partition &p) {
  for (std::size_t i = 0; i < p.classes.size(); ++i) {
    out << "class " << i + 1 << ':';
    write_members(out, p.classes[i]);
  }
  out << "exceptional:";
  write_members(out, p.exceptional);
}

Partition read_partition(std::istream &in, std::size_t n) {
  Partition p{VertexSet(n), {}};
  std::vector<std::optional<VertexSet>> slots;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos)
      line.resize(hash);
    line = trim(line);
    if (line.empty())
      continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos)
      throw ParseError(lineno, "expected 'class <i>:' or 'exceptional:'");
    const std::string head = trim(line.substr(0, colon));
    VertexSet members(n);
    std::istringstream body(line.substr(colon + 1));
    std::string tok;
    while (body >> tok) {
      std::size_t used = 0;
      unsigned long long v = 0;
      try {
        v = std::stoull(tok, &used);
      } catch (const std::exception &) {
        used = 0;
      }
      if (used != tok.size() || tok[0] == '-')
        throw ParseError(lineno, "bad vertex '" + tok + "'");
      if (v >= n)
        throw ParseError(lineno, "vertex " + tok + " outside [0, n)");
      members.insert(static_cast<Vertex>(v));
    }
    if (head == "exceptional") {
      p.exceptional |= members;
      continue;
    }
    std::istringstream hs(head);
    std::string word;
    std::size_t index = 0;
    if (!(hs >> word >> index) || word != "class" || index == 0 || !(hs >> std::ws).eof())
      throw ParseError(lineno, "expected 'class <i>:' with i >= 1");
    if (slots.size() < index)
      slots.resize(index);
    if (slots[index - 1])
      throw ParseError(lineno, "class " + std::to_string(index) + " listed twice");
    slots[index - 1] = members;
  }
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (!slots[i])
      throw ParseError(lineno, "class " + std::to_string(i + 1) + " missing");
    p.classes.push_back(*slots[i]);
  }
  p.validate();
  return p;
}

Partition load_partition(const std::string &path, std::size_t n) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorKind::io_error, "cannot open " + path);
  return read_partition(in, n);
}

void save_partition(const std::string &path, const Partition &p) {
  std::ofstream out(path);
  if (!out)
    throw Error(ErrorKind::io_error, "cannot write " + path);
  write_partition(out, p);
}

ReducedGraph reduced_graph(const LayeredGraph &g, Layer layer, const Partition &p, double eps,
                           double d, const RegularityOptions &options) {
  const std::size_t t = p.classes.size();
  std::vector<std::pair<std::size_t, std::size_t>> index;
  for (std::size_t i = 0; i < t; ++i)
    for (std::size_t j = i + 1; j < t; ++j)
      index.emplace_back(i, j);
  ReducedGraph out;
  out.pairs.resize(index.size());
  parallel_for(index.size(), options.threads, [&](std::size_t k) {
    const auto [i, j] = index[k];
    const auto &a = p.classes[i];
    const auto &b = p.classes[j];
    if (a.size() <= options.exact_cap && b.size() <= options.exact_cap)
      out.pairs[k] = is_eps_regular_exact(g, layer, a, b, eps, options.exact_cap);
    else
      out.pairs[k] = is_eps_regular_sampled(g, layer, a, b, eps, options.samples,
                                            derive_seed(options.seed, k));
  });
  out.densities.assign(t, std::vector<Density>(t, Density(0)));
  std::vector<Edge> edges;
  for (std::size_t k = 0; k < index.size(); ++k) {
    const auto [i, j] = index[k];
    const auto &rep = out.pairs[k];
    out.densities[i][j] = out.densities[j][i] = rep.d;
    if (rep.verdict == RegularityVerdict::undecided)
      out.undecided.emplace_back(i, j);
    if (rep.verdict == RegularityVerdict::regular && boost::rational_cast<double>(rep.d) >= d)
      edges.push_back(Edge::of(static_cast<Vertex>(i), static_cast<Vertex>(j)));
  }
  out.graph = LayeredGraph(t, edges);
  return out;
}

DegreeFormReport check_degree_form(const LayeredGraph &g, Layer layer, const Partition &p,
                                   double eps, double d, const LayeredGraph *reference,
                                   const RegularityOptions &options) {
  DegreeFormReport rep;
  const std::size_t n = g.order();
  const auto nd = static_cast<double>(n);
  p.validate();
  const std::size_t t = p.classes.size();

  rep.exceptional_small = static_cast<double>(p.exceptional.size()) <= eps * nd + 1e-9;
  if (!rep.exceptional_small)
    rep.violations.push_back("(i) exceptional set has " + std::to_string(p.exceptional.size()) +
                             " vertices");

  rep.equal_sizes = t > 0;
  if (t == 0)
    rep.violations.push_back("(ii) no classes");
  for (const auto &cls : p.classes) {
    const auto size = static_cast<double>(cls.size());
    const double hi = nd / static_cast<double>(t);
    if (cls.size() != p.classes.front().size() || size > hi + 1e-9 ||
        size < (1.0 - eps) * hi - 1e-9) {
      rep.equal_sizes = false;
      rep.violations.push_back("(ii) class sizes not equal within [(1-eps)n/t, n/t]");
      break;
    }
  }

  if (reference) {
    rep.degrees_kept = true;
    for (Vertex v = 0; v < n; ++v) {
      if (static_cast<double>(g.degree(v, layer)) + 1e-9 <
          static_cast<double>(reference->degree(v, layer)) - (d + eps) * nd) {
        rep.degrees_kept = false;
        rep.violations.push_back("(iii) vertex " + std::to_string(v) + " lost too many edges");
        break;
      }
    }
  }

  rep.classes_empty = true;
  for (std::size_t i = 0; i < t && rep.classes_empty; ++i)
    p.classes[i].for_each([&](Vertex v) {
      if (rep.classes_empty && g.neighbors(v, layer).intersects(p.classes[i])) {
        rep.classes_empty = false;
        rep.violations.push_back("(iv) class " + std::to_string(i + 1) + " contains an edge");
      }
    });

  rep.pairs_regular = true;
  const auto reduced = reduced_graph(g, layer, p, eps, d, options);
  for (const auto &pair : reduced.pairs) {
    const double density = boost::rational_cast<double>(pair.d);
    const bool density_ok = pair.d == Density(0) || density >= d;
    if (pair.verdict != RegularityVerdict::regular || !density_ok) {
      rep.pairs_regular = false;
      rep.violations.push_back("(v) a class pair is " + to_string(pair.verdict) +
                               " with density " + std::to_string(density));
      break;
    }
  }
  return rep;
}

bool reduced_min_degree_inherits(const LayeredGraph &g, Layer layer, const Partition &p,
                                 double eps, double d, int k, double alpha,
                                 const RegularityOptions &options) {
  const std::size_t t = p.classes.size();
  if (t == 0)
    return false;
  const auto reduced = reduced_graph(g, layer, p, eps, d, options);
  const double needed =
      (static_cast<double>(k) / (k + 1) + alpha / 4.0) * static_cast<double>(t);
  return static_cast<double>(min_degree(reduced.graph, Layer::gamma)) + 1e-9 >= needed;
}

namespace {

struct EmbeddingCounter {
  const LayeredGraph &h;
  const LayeredGraph &g;
  Layer layer;
  const std::vector<VertexSet> &sigma;
  std::vector<Vertex> image;

  std::uint64_t run(std::size_t v) {
    if (v == h.order())
      return 1;
    VertexSet cand = sigma[v];
    for (std::size_t u = 0; u < v; ++u)
      if (h.adjacent(static_cast<Vertex>(u), static_cast<Vertex>(v), Layer::gamma))
        cand &= g.neighbors(image[u], layer);
    std::uint64_t total = 0;
    cand.for_each([&](Vertex w) {
      image[v] = w;
      total += run(v + 1);
    });
    return total;
  }
};

void check_assignment(const LayeredGraph &h, const LayeredGraph &g,
                      const std::vector<VertexSet> &sigma) {
  if (h.order() > 8)
    throw Error(ErrorKind::too_large, "pattern graph above 8 vertices");
  if (sigma.size() != h.order())
    throw Error(ErrorKind::invalid_argument, "need one target set per pattern vertex");
  VertexSet seen(g.order());
  for (const auto &s : sigma) {
    if (s.universe() != g.order())
      throw Error(ErrorKind::invalid_argument, "target set over the wrong universe");
    if (s.intersects(seen))
      throw Error(ErrorKind::disjointness_violation, "target sets overlap");
    seen |= s;
  }
}

} // namespace

std::uint64_t count_embeddings(const LayeredGraph &h, const LayeredGraph &g, Layer layer,
                               const std::vector<VertexSet> &sigma) {
  check_assignment(h, g, sigma);
  EmbeddingCounter counter{h, g, layer, sigma, std::vector<Vertex>(h.order(), 0)};
  return counter.run(0);
}

std::pair<double, double> counting_lemma_band(const LayeredGraph &h, const LayeredGraph &g,
                                              Layer layer,
                                              const std::vector<VertexSet> &sigma,
                                              double gamma) {
  check_assignment(h, g, sigma);
  double sizes = 1.0;
  for (const auto &s : sigma)
    sizes *= static_cast<double>(s.size());
  double product = 1.0;
  for (const auto &e : h.edges(Layer::gamma))
    product *= boost::rational_cast<double>(density(g, layer, sigma[e.u], sigma[e.v]));
  return {sizes * (product - gamma), sizes * (product + gamma)};
}

} // namespace powerlab
