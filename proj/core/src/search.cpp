#include "powerlab/search.hpp"

#include "powerlab/error.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <unordered_map>

namespace powerlab {

std::string to_string(Verdict v) {
  switch (v) {
  case Verdict::found: return "found";
  case Verdict::not_found: return "not_found";
  case Verdict::budget_exceeded: return "budget_exceeded";
  }
  return "unknown";
}

BudgetMeter::BudgetMeter(const SearchBudget &budget)
    : budget_(budget), start_(std::chrono::steady_clock::now()) {}

bool BudgetMeter::tick() {
  if (exceeded_)
    return false;
  ++nodes_;
  if (nodes_ > budget_.max_nodes) {
    exceeded_ = true;
  } else if ((nodes_ & 0xfff) == 0) {
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_;
    exceeded_ = elapsed.count() > budget_.time_limit;
  }
  return !exceeded_;
}

namespace {

using Mask = std::uint64_t;

inline Mask bit(std::size_t i) { return Mask{1} << i; }
inline int popcount(Mask m) { return std::popcount(m); }
inline std::size_t lowest(Mask m) { return static_cast<std::size_t>(std::countr_zero(m)); }
inline Mask full_mask(std::size_t n) { return n == 64 ? ~Mask{0} : bit(n) - 1; }

std::vector<Mask> adjacency_masks(const LayeredGraph &g, Layer layer) {
  const std::size_t n = g.order();
  if (n > 64)
    throw Error(ErrorKind::too_large, "exact search supports at most 64 vertices");
  std::vector<Mask> adj(n, 0);
  for (Vertex v = 0; v < n; ++v)
    g.neighbors(v, layer).for_each([&](Vertex w) { adj[v] |= bit(w); });
  return adj;
}

class CycleSearch {
public:
  CycleSearch(const LayeredGraph &g, int r, const SearchBudget &budget)
      : n_(g.order()), r_(static_cast<std::size_t>(r)), adj_(adjacency_masks(g, Layer::combined)),
        meter_(budget) {
    need_ = std::min(2 * r_, n_ - 1);
  }

  CycleSearchResult run() {
    CycleSearchResult result;
    for (std::size_t v = 0; v < n_; ++v)
      if (static_cast<std::size_t>(popcount(adj_[v])) < need_) {
        result.verdict = Verdict::not_found;
        return result;
      }
    pos_.assign(n_, 0);
    pos_[0] = 0;
    placed_ = bit(0);
    const bool ok = extend(1);
    result.nodes = meter_.nodes();
    if (ok) {
      result.verdict = Verdict::found;
      result.order.assign(pos_.begin(), pos_.end());
    } else {
      result.verdict = meter_.exceeded() ? Verdict::budget_exceeded : Verdict::not_found;
    }
    return result;
  }

private:
  bool extend(std::size_t len) {
    if (len == n_)
      return true;
    Mask cand = full_mask(n_) & ~placed_;
    const std::size_t lo = len > r_ ? len - r_ : 0;
    for (std::size_t i = lo; i < len; ++i)
      cand &= adj_[pos_[i]];
    if (len + r_ >= n_)
      for (std::size_t i = 0; i <= len + r_ - n_; ++i)
        cand &= adj_[pos_[i]];
    if (len == n_ - 1 && n_ >= 3)
      cand &= ~full_mask(pos_[1] + 1);
    while (cand) {
      const std::size_t v = lowest(cand);
      cand &= cand - 1;
      if (!meter_.tick())
        return false;
      pos_[len] = static_cast<Vertex>(v);
      placed_ |= bit(v);
      if (feasible(len + 1) && extend(len + 1))
        return true;
      placed_ &= ~bit(v);
      if (meter_.exceeded())
        return false;
    }
    return false;
  }

  // Every unplaced vertex must still be able to see min(2r, n-1) cycle
  // neighbours among unplaced vertices and the placed vertices it can border.
  bool feasible(std::size_t len) const {
    Mask border = 0;
    for (std::size_t i = (len > r_ ? len - r_ : 0); i < len; ++i)
      border |= bit(pos_[i]);
    for (std::size_t i = 0; i < std::min(r_, len); ++i)
      border |= bit(pos_[i]);
    const Mask open = full_mask(n_) & ~placed_;
    for (Mask rest = open; rest; rest &= rest - 1) {
      const std::size_t u = lowest(rest);
      if (static_cast<std::size_t>(popcount(adj_[u] & (open | border) & ~bit(u))) < need_)
        return false;
    }
    return true;
  }

  std::size_t n_;
  std::size_t r_;
  std::size_t need_ = 0;
  std::vector<Mask> adj_;
  BudgetMeter meter_;
  std::vector<Vertex> pos_;
  Mask placed_ = 0;
};

} // namespace

CycleSearchResult find_power_ham_cycle(const LayeredGraph &g, int r, const SearchBudget &budget) {
  if (r < 1)
    throw Error(ErrorKind::invalid_argument, "power must be positive");
  if (g.order() < static_cast<std::size_t>(r) + 1)
    throw Error(ErrorKind::invalid_argument, "need n >= r + 1");
  return CycleSearch(g, r, budget).run();
}

namespace {

class PathSearch {
public:
  PathSearch(std::vector<Mask> adj, std::size_t r, BudgetMeter &meter)
      : adj_(std::move(adj)), r_(r), meter_(meter) {}

  // seq holds fixed entries; positions in [first_free, last_free) are filled
  // from pool.
  bool fill(std::vector<std::size_t> &seq, std::size_t p, std::size_t end_free, Mask pool) {
    if (p == end_free)
      return true;
    Mask cand = pool;
    for (std::size_t d = 1; d <= r_ && d <= p; ++d)
      cand &= adj_[seq[p - d]];
    for (std::size_t q = end_free; q < seq.size() && q - p <= r_; ++q)
      cand &= adj_[seq[q]];
    while (cand) {
      const std::size_t v = lowest(cand);
      cand &= cand - 1;
      if (!meter_.tick())
        return false;
      seq[p] = v;
      if (fill(seq, p + 1, end_free, pool & ~bit(v)))
        return true;
      if (meter_.exceeded())
        return false;
    }
    return false;
  }

private:
  std::vector<Mask> adj_;
  std::size_t r_;
  BudgetMeter &meter_;
};

} // namespace

PathSearchResult find_power_path_between(const LayeredGraph &g, const VertexTuple &s,
                                         const VertexTuple &t, int r,
                                         const VertexSet &allowed,
                                         const SearchBudget &budget, bool spanning) {
  const std::size_t width = static_cast<std::size_t>(r) + 1;
  if (r < 1)
    throw Error(ErrorKind::invalid_argument, "power must be positive");
  if (allowed.universe() != g.order())
    throw Error(ErrorKind::invalid_argument, "allowed set over the wrong universe");
  for (const auto *tuple : {&s, &t}) {
    if (tuple->size() != width || !is_clique(g, Layer::combined, *tuple))
      throw Error(ErrorKind::invalid_endpoint, "endpoint is not an (r+1)-clique");
    for (auto v : *tuple)
      if (!allowed.contains(v))
        throw Error(ErrorKind::invalid_argument, "endpoint vertex outside the allowed set");
  }

  const auto verts = allowed.to_vector();
  const std::size_t m = verts.size();
  if (m > 64)
    throw Error(ErrorKind::too_large, "path search supports at most 64 allowed vertices");
  std::vector<std::size_t> local(g.order(), 0);
  for (std::size_t i = 0; i < m; ++i)
    local[verts[i]] = i;
  std::vector<Mask> adj(m, 0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (i != j && g.adjacent(verts[i], verts[j], Layer::combined))
        adj[i] |= bit(j);

  Mask endpoint_mask = 0;
  for (auto v : s)
    endpoint_mask |= bit(local[v]);
  for (auto v : t)
    endpoint_mask |= bit(local[v]);
  const Mask pool = full_mask(m) & ~endpoint_mask;

  BudgetMeter meter(budget);
  PathSearch search(adj, static_cast<std::size_t>(r), meter);
  PathSearchResult result;
  const std::size_t min_len = width;
  const std::size_t max_len = m;
  for (std::size_t len = spanning ? m : min_len; len <= max_len; ++len) {
    // Place s at the front and t at the back; they must agree where they
    // overlap and may not share vertices elsewhere.
    std::vector<std::size_t> seq(len, SIZE_MAX);
    bool consistent = true;
    for (std::size_t i = 0; i < width; ++i)
      seq[i] = local[s[i]];
    for (std::size_t i = 0; i < width; ++i) {
      const std::size_t p = len - width + i;
      if (seq[p] != SIZE_MAX && seq[p] != local[t[i]])
        consistent = false;
      seq[p] = local[t[i]];
    }
    if (!consistent)
      continue;
    const std::size_t fixed = std::min(len, 2 * width);
    if (static_cast<std::size_t>(popcount(endpoint_mask)) != fixed)
      continue;
    const std::size_t free_slots = len - fixed;
    if (static_cast<std::size_t>(popcount(pool)) < free_slots)
      break;
    if (spanning && static_cast<std::size_t>(popcount(pool)) != free_slots)
      continue;
    bool fixed_ok = true;
    for (std::size_t i = 0; i < len && fixed_ok; ++i)
      for (std::size_t j = i + 1; j < len && j - i <= static_cast<std::size_t>(r); ++j)
        if (seq[i] != SIZE_MAX && seq[j] != SIZE_MAX && i < width && j >= len - width &&
            !(adj[seq[i]] & bit(seq[j])))
          fixed_ok = false;
    if (!fixed_ok)
      continue;
    if (search.fill(seq, width, len - width > width ? len - width : width, pool)) {
      VertexTuple out;
      for (auto x : seq)
        out.push_back(verts[x]);
      result.verdict = Verdict::found;
      result.path = PowerPath(std::move(out), r);
      result.nodes = meter.nodes();
      return result;
    }
    if (meter.exceeded())
      break;
  }
  result.nodes = meter.nodes();
  result.verdict = meter.exceeded() ? Verdict::budget_exceeded : Verdict::not_found;
  return result;
}

bool oracle_contains_power_ham_cycle(const LayeredGraph &g, int r) {
  const std::size_t n = g.order();
  if (n > 10)
    throw Error(ErrorKind::too_large, "oracle supports n <= 10");
  if (n < static_cast<std::size_t>(r) + 1)
    throw Error(ErrorKind::invalid_argument, "need n >= r + 1");
  std::vector<Vertex> order(n);
  std::iota(order.begin(), order.end(), 0);
  do {
    if (n >= 3 && order[1] > order[n - 1])
      continue;
    if (is_power_hamilton_cycle(g, order, r))
      return true;
  } while (std::next_permutation(order.begin() + 1, order.end()));
  return false;
}

namespace {

void collect_cliques(const std::vector<Mask> &adj, Mask members, Mask cand, int remaining,
                     std::vector<Mask> &out) {
  if (remaining == 0) {
    out.push_back(members);
    return;
  }
  if (popcount(cand) < remaining)
    return;
  while (cand) {
    const std::size_t v = lowest(cand);
    cand &= cand - 1;
    collect_cliques(adj, members | bit(v), cand & adj[v], remaining - 1, out);
  }
}

class Packer {
public:
  Packer(std::vector<std::vector<Mask>> by_lowest, int q, const SearchBudget &budget)
      : by_lowest_(std::move(by_lowest)), q_(q), meter_(budget) {}

  int solve(Mask rest) {
    if (!rest)
      return 0;
    if (auto it = memo_.find(rest); it != memo_.end())
      return it->second.first;
    if (!meter_.tick())
      throw Error(ErrorKind::budget_exceeded, "clique packing budget exhausted");
    const std::size_t v = lowest(rest);
    const int bound = popcount(rest) / q_;
    int best = -1;
    Mask choice = 0;
    for (Mask c : by_lowest_[v]) {
      if ((c & rest) != c)
        continue;
      if (1 + (popcount(rest) - q_) / q_ <= best)
        break;
      const int value = 1 + solve(rest & ~c);
      if (value > best) {
        best = value;
        choice = c;
      }
      if (best == bound)
        break;
    }
    if (best < popcount(rest & ~bit(v)) / q_) {
      const int value = solve(rest & ~bit(v));
      if (value > best) {
        best = value;
        choice = 0;
      }
    }
    best = std::max(best, 0);
    memo_.emplace(rest, std::make_pair(best, choice));
    return best;
  }

  std::vector<Mask> reconstruct(Mask rest) const {
    std::vector<Mask> out;
    while (rest) {
      auto it = memo_.find(rest);
      if (it == memo_.end())
        break;
      if (it->second.second) {
        out.push_back(it->second.second);
        rest &= ~it->second.second;
      } else {
        rest &= ~bit(lowest(rest));
      }
    }
    return out;
  }

  std::uint64_t nodes() const { return meter_.nodes(); }

private:
  std::vector<std::vector<Mask>> by_lowest_;
  int q_;
  BudgetMeter meter_;
  std::unordered_map<Mask, std::pair<int, Mask>> memo_;
};

} // namespace

PackingResult max_clique_packing(const LayeredGraph &g, int q, const SearchBudget &budget,
                                 Layer layer) {
  if (q < 2)
    throw Error(ErrorKind::invalid_argument, "clique size must be at least 2");
  const auto adj = adjacency_masks(g, layer);
  const std::size_t n = g.order();
  std::vector<std::vector<Mask>> by_lowest(n);
  Mask eligible = 0;
  for (std::size_t v = 0; v < n; ++v) {
    const Mask higher = adj[v] & ~full_mask(v + 1);
    collect_cliques(adj, bit(v), higher, q - 1, by_lowest[v]);
    for (Mask c : by_lowest[v])
      eligible |= c;
  }
  Packer packer(by_lowest, q, budget);
  packer.solve(eligible);
  PackingResult result;
  result.nodes = packer.nodes();
  result.uncovered = VertexSet::full(n);
  for (Mask c : packer.reconstruct(eligible)) {
    VertexTuple clique;
    for (Mask m = c; m; m &= m - 1) {
      clique.push_back(static_cast<Vertex>(lowest(m)));
      result.uncovered.erase(static_cast<Vertex>(lowest(m)));
    }
    result.cliques.push_back(std::move(clique));
  }
  return result;
}

namespace {

std::uint64_t count_from(const LayeredGraph &g, Layer layer, const VertexSet &cand, int remaining) {
  if (remaining == 0)
    return 1;
  if (cand.size() < static_cast<std::size_t>(remaining))
    return 0;
  std::uint64_t total = 0;
  for (Vertex v = cand.first(); v != npos; v = cand.next(v)) {
    VertexSet next = cand & g.neighbors(v, layer);
    // Only extend upwards so each clique is counted once.
    for (Vertex w = next.first(); w != npos && w <= v; w = next.first())
      next.erase(w);
    total += count_from(g, layer, next, remaining - 1);
  }
  return total;
}

} // namespace

std::uint64_t count_cliques_in_layer(const LayeredGraph &g, Layer layer, int q) {
  if (q < 1)
    throw Error(ErrorKind::invalid_argument, "clique size must be positive");
  return count_from(g, layer, g.vertices(), q);
}

std::string to_string(TightnessConstruction c) {
  return c == TightnessConstruction::xy ? "xy" : "multipartite";
}

TightnessConstruction tightness_construction_from_string(const std::string &text) {
  if (text == "xy")
    return TightnessConstruction::xy;
  if (text == "multipartite")
    return TightnessConstruction::multipartite;
  throw Error(ErrorKind::invalid_argument, "unknown construction '" + text + "'");
}

std::string to_string(CertificateVerdict v) {
  switch (v) {
  case CertificateVerdict::pass: return "PASS";
  case CertificateVerdict::fail: return "FAIL";
  case CertificateVerdict::inapplicable: return "INAPPLICABLE";
  }
  return "unknown";
}

namespace {

// X = vertices of gamma-degree below n - 1; checks the X/Y shape.
VertexSet xy_split(const LayeredGraph &g) {
  const std::size_t n = g.order();
  VertexSet x(n);
  for (Vertex v = 0; v < n; ++v)
    if (g.degree(v, Layer::gamma) + 1 < n)
      x.insert(v);
  const VertexSet y = g.vertices() - x;
  if (x.empty() || y.empty())
    throw Error(ErrorKind::wrong_construction, "graph has no X/Y split");
  bool ok = true;
  x.for_each([&](Vertex v) {
    if (g.neighbors(v, Layer::gamma) != y)
      ok = false;
  });
  if (!ok)
    throw Error(ErrorKind::wrong_construction, "gamma layer is not the X/Y construction");
  return x;
}

std::vector<VertexSet> multipartite_classes(const LayeredGraph &g) {
  const std::size_t n = g.order();
  VertexSet assigned(n);
  std::vector<VertexSet> classes;
  for (Vertex v = 0; v < n; ++v) {
    if (assigned.contains(v))
      continue;
    VertexSet cls = g.vertices() - g.neighbors(v, Layer::gamma);
    if (cls.intersects(assigned))
      throw Error(ErrorKind::wrong_construction, "gamma layer is not complete multipartite");
    classes.push_back(cls);
    assigned |= cls;
  }
  for (const auto &cls : classes)
    cls.for_each([&](Vertex v) {
      if (g.neighbors(v, Layer::gamma) != g.vertices() - cls)
        throw Error(ErrorKind::wrong_construction, "gamma layer is not complete multipartite");
    });
  return classes;
}

} // namespace

TightnessReport tightness_certificate(TightnessConstruction construction, const LayeredGraph &g,
                                      int k, const SearchBudget &budget) {
  if (k < 1)
    throw Error(ErrorKind::invalid_argument, "k must be positive");
  TightnessReport rep;
  rep.construction = construction;
  rep.n = g.order();
  rep.k = k;
  rep.random_triangles = count_cliques_in_layer(g, Layer::random, 3);
  rep.random_k4 = count_cliques_in_layer(g, Layer::random, 4);

  if (construction == TightnessConstruction::xy) {
    const VertexSet x = xy_split(g);
    rep.x_size = x.size();
    rep.clique_size = 2 * k + 3;
    rep.packing_needed = rep.n / static_cast<std::size_t>(rep.clique_size);
    if (rep.random_k4 > 0 || rep.random_triangles >= rep.x_size) {
      rep.verdict = CertificateVerdict::inapplicable;
      rep.note = "random layer has a K4 or at least |X| triangles";
      return rep;
    }
    try {
      const auto packing = max_clique_packing(g, rep.clique_size, budget);
      rep.max_packing = packing.cliques.size();
      rep.uncovered_x = (packing.uncovered & x).size();
      rep.verdict = rep.max_packing < rep.packing_needed ? CertificateVerdict::pass
                                                         : CertificateVerdict::fail;
      if (rep.verdict == CertificateVerdict::fail)
        rep.note = "a packing of the required size exists";
    } catch (const Error &e) {
      if (e.kind() != ErrorKind::budget_exceeded)
        throw;
      rep.verdict = CertificateVerdict::fail;
      rep.note = "packing search exceeded its budget";
    }
    return rep;
  }

  const auto classes = multipartite_classes(g);
  if (classes.size() != static_cast<std::size_t>(k + 1))
    throw Error(ErrorKind::wrong_construction,
                "expected " + std::to_string(k + 1) + " classes, found " +
                    std::to_string(classes.size()));
  for (const auto &cls : classes) {
    std::size_t isolated = 0;
    cls.for_each([&](Vertex v) {
      if (g.degree(v, Layer::random) == 0)
        ++isolated;
    });
    rep.isolated_per_class.push_back(isolated);
  }
  rep.isolated = *std::max_element(rep.isolated_per_class.begin(), rep.isolated_per_class.end());
  rep.remainder = rep.n % static_cast<std::size_t>(2 * k + 2);
  const bool applicable = rep.isolated > rep.remainder &&
                          rep.random_triangles < rep.isolated - rep.remainder;
  if (!applicable) {
    rep.verdict = CertificateVerdict::inapplicable;
    rep.note = "random triangles do not fall short of |I| - (n mod (2k+2))";
    return rep;
  }
  rep.verdict = CertificateVerdict::pass;
  return rep;
}

} // namespace powerlab
