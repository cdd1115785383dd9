#include "powerlab/pipeline.hpp"

#include "powerlab/error.hpp"
#include "powerlab/io.hpp"
#include "powerlab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace powerlab {

std::map<std::string, std::string> PipelineParams::to_key_values() const {
  return {
      {"rho", format_double(rho)},
      {"gamma", format_double(gamma)},
      {"lambda", format_double(lambda)},
      {"xi", format_double(xi)},
      {"eps", format_double(eps)},
      {"d", format_double(d)},
      {"tol", format_double(tol)},
      {"retry_limit", std::to_string(retry_limit)},
      {"max_nodes", std::to_string(budget.max_nodes)},
      {"time_limit", format_double(budget.time_limit)},
  };
}

PipelineParams PipelineParams::from_key_values(const std::map<std::string, std::string> &kv) {
  PipelineParams p;
  auto real = [&](const char *key, double &slot) {
    if (auto it = kv.find(key); it != kv.end())
      slot = std::stod(it->second);
  };
  try {
    real("rho", p.rho);
    real("gamma", p.gamma);
    real("lambda", p.lambda);
    real("xi", p.xi);
    real("eps", p.eps);
    real("d", p.d);
    real("tol", p.tol);
    real("time_limit", p.budget.time_limit);
    if (auto it = kv.find("retry_limit"); it != kv.end())
      p.retry_limit = std::stoi(it->second);
    if (auto it = kv.find("max_nodes"); it != kv.end())
      p.budget.max_nodes = std::stoull(it->second);
  } catch (const std::logic_error &e) {
    throw Error(ErrorKind::invalid_argument, std::string("bad pipeline parameter: ") + e.what());
  }
  p.validate();
  return p;
}

void PipelineParams::validate() const {
  for (double v : {rho, gamma, lambda, xi, eps, d, tol})
    if (!(v > 0.0 && v < 1.0))
      throw Error(ErrorKind::range_violation, "pipeline fractions must lie in (0, 1)");
  if (retry_limit < 1)
    throw Error(ErrorKind::invalid_argument, "retry_limit must be at least 1");
  if (budget.max_nodes == 0 || !(budget.time_limit > 0.0))
    throw Error(ErrorKind::invalid_argument, "search budget must be positive");
}

ExtendibilityCheck is_extendible(const LayeredGraph &g, Layer layer, const VertexTuple &v,
                                 const SetTuple &sets, double rho) {
  if (v.size() != 2 * sets.size())
    throw Error(ErrorKind::length_mismatch,
                "tuple of length " + std::to_string(v.size()) + " against " +
                    std::to_string(sets.size()) + " sets");
  ExtendibilityCheck out{v, sets, rho, {}, true};
  for (std::size_t i = 1; i <= sets.size(); ++i) {
    const auto suffix = suffix_from(v, 2 * i);
    const auto &target = sets[i - 1];
    double margin = 0.0;
    if (!target.empty())
      margin = static_cast<double>(common_neighborhood(g, layer, suffix, target).size()) /
               static_cast<double>(target.size());
    out.margins.push_back(margin);
    if (target.empty() || margin + 1e-12 < rho)
      out.extendible = false;
  }
  return out;
}

bool is_skeleton_pair(std::size_t a, std::size_t b, int k) {
  if (a < b)
    std::swap(a, b);
  const std::size_t diff = a - b;
  return (diff == 1 && b % 2 == 1) ||
         (diff == static_cast<std::size_t>(2 * k + 1) && b % 2 == 0);
}

LayerAudit audit_layers(const LayeredGraph &g, const PowerPath &p, int k) {
  LayerAudit audit;
  audit.ok = true;
  const auto &v = p.vertices();
  const std::size_t r = static_cast<std::size_t>(2 * k + 1);
  for (std::size_t j = 0; j < v.size(); ++j)
    for (std::size_t i = (j > r ? j - r : 0); i < j; ++i) {
      if (is_skeleton_pair(j + 1, i + 1, k)) {
        if (g.adjacent(v[i], v[j], Layer::random))
          ++audit.skeleton_random;
        else if (g.adjacent(v[i], v[j], Layer::gamma))
          ++audit.skeleton_gamma;
        else
          audit.ok = false;
      } else {
        ++audit.dense_pairs;
        if (!g.adjacent(v[i], v[j], Layer::gamma))
          audit.ok = false;
      }
    }
  return audit;
}

namespace {

// Reverse order of the classes V_2..V_{k+1}, led by Y: the s-side target.
SetTuple s_side_sets(const VertexSet &y, const SetTuple &v, int k) {
  SetTuple out{y};
  for (int i = k + 1; i >= 2; --i)
    out.push_back(v[static_cast<std::size_t>(i - 1)]);
  return out;
}

// (Y, V_{l-k}, ..., V_{l-1}): the t-side target.
SetTuple t_side_sets(const VertexSet &y, const SetTuple &v, int k) {
  SetTuple out{y};
  const std::size_t l = v.size();
  for (std::size_t i = l - static_cast<std::size_t>(k); i <= l - 1; ++i)
    out.push_back(v[i - 1]);
  return out;
}

class BicanonicalSearch {
public:
  BicanonicalSearch(const LayeredGraph &g, int k, const SetTuple &sets,
                    const std::optional<SetTuple> &s_sets,
                    const std::optional<SetTuple> &t_sets, double rho,
                    const SearchBudget &budget, const std::vector<std::size_t> *rank)
      : g_(g), k_(k), r_(static_cast<std::size_t>(2 * k + 1)), sets_(sets),
        len_(2 * sets.size()), s_sets_(s_sets), t_sets_(t_sets), rho_(rho), meter_(budget),
        rank_(rank), placed_(g.order()), seq_(2 * sets.size(), 0) {}

  bool run() {
    for (const auto &s : sets_)
      if (s.empty())
        return false;
    return extend(0);
  }

  const VertexTuple &sequence() const { return seq_; }
  bool exceeded() const { return meter_.exceeded(); }
  std::uint64_t nodes() const { return meter_.nodes(); }

private:
  VertexSet candidates(std::size_t p, std::size_t filled) const {
    VertexSet cand = sets_[p / 2] - placed_;
    for (std::size_t q = (p > r_ ? p - r_ : 0); q < filled && q < p; ++q) {
      const Layer layer = is_skeleton_pair(p + 1, q + 1, k_) ? Layer::combined : Layer::gamma;
      cand &= g_.neighbors(seq_[q], layer);
      if (cand.empty())
        break;
    }
    return cand;
  }

  // Every position within reach of the filled prefix must keep a candidate.
  bool lookahead(std::size_t filled) const {
    for (std::size_t f = filled; f < len_ && f < filled + r_; ++f)
      if (candidates(f, filled).empty())
        return false;
    return true;
  }

  // Sound bound after s is complete: the final target set can lose at most
  // one vertex per remaining position that can reach it, so the common
  // neighbourhood must already cover rho of what can remain.
  bool s_prune(std::size_t filled) const {
    if (!s_sets_ || s_sets_->empty())
      return true;
    const VertexTuple rs = rev(prefix(seq_, 2 * s_sets_->size()));
    for (std::size_t i = 1; i <= s_sets_->size(); ++i) {
      const VertexSet now = (*s_sets_)[i - 1] - placed_;
      std::size_t reach = 0;
      for (std::size_t f = filled; f < len_; ++f)
        if (sets_[f / 2].intersects(now))
          ++reach;
      const std::size_t size = now.size();
      const std::size_t floor_size = size > reach ? size - reach : 0;
      if (size == 0)
        return false;
      const auto common = common_neighborhood(g_, Layer::gamma, suffix_from(rs, 2 * i), now);
      if (static_cast<double>(common.size()) + 1e-12 <
          rho_ * static_cast<double>(std::max<std::size_t>(floor_size, 1)))
        return false;
    }
    return true;
  }

  bool endpoints_ok() const {
    const VertexSet path(g_.order(), std::span<const Vertex>(seq_));
    if (s_sets_ && !s_sets_->empty()) {
      const VertexTuple rs = rev(prefix(seq_, 2 * s_sets_->size()));
      if (!is_extendible(g_, Layer::gamma, rs, subtract(*s_sets_, path), rho_).extendible)
        return false;
    }
    if (t_sets_ && !t_sets_->empty()) {
      const VertexTuple t(seq_.end() - static_cast<std::ptrdiff_t>(2 * t_sets_->size()),
                          seq_.end());
      if (!is_extendible(g_, Layer::gamma, t, subtract(*t_sets_, path), rho_).extendible)
        return false;
    }
    return true;
  }

  bool extend(std::size_t p) {
    if (p == len_)
      return endpoints_ok();
    const VertexSet cand = candidates(p, p);
    std::vector<Vertex> order = cand.to_vector();
    if (rank_)
      std::sort(order.begin(), order.end(),
                [&](Vertex a, Vertex b) { return (*rank_)[a] < (*rank_)[b]; });
    for (Vertex v : order) {
      if (!meter_.tick())
        return false;
      seq_[p] = v;
      placed_.insert(v);
      bool ok = lookahead(p + 1);
      if (ok && s_sets_ && p + 1 == 2 * s_sets_->size())
        ok = s_prune(p + 1);
      if (ok && extend(p + 1))
        return true;
      placed_.erase(v);
      if (meter_.exceeded())
        return false;
    }
    return false;
  }

  const LayeredGraph &g_;
  int k_;
  std::size_t r_;
  const SetTuple &sets_;
  std::size_t len_;
  const std::optional<SetTuple> &s_sets_;
  const std::optional<SetTuple> &t_sets_;
  double rho_;
  BudgetMeter meter_;
  const std::vector<std::size_t> *rank_;
  VertexSet placed_;
  VertexTuple seq_;
};

} // namespace

BicanonicalPath build_bicanonical_path(const LayeredGraph &g, int k, const SetTuple &sets,
                                       const VertexSet &ys, const VertexSet &yt, double rho,
                                       const PipelineParams &params, std::uint64_t seed,
                                       const EndpointSets &endpoints) {
  if (k < 1)
    throw Error(ErrorKind::invalid_argument, "k must be positive");
  if (sets.size() < static_cast<std::size_t>(k) + 1)
    throw Error(ErrorKind::invalid_argument, "need at least k + 1 sets");
  std::optional<SetTuple> s_sets = endpoints.s_sets;
  std::optional<SetTuple> t_sets = endpoints.t_sets;
  if (!s_sets && !ys.empty())
    s_sets = s_side_sets(ys, sets, k);
  if (!t_sets && !yt.empty())
    t_sets = t_side_sets(yt, sets, k);
  for (const auto *side : {&s_sets, &t_sets})
    if (*side && !(*side)->empty() && (*side)->size() != static_cast<std::size_t>(k) + 1)
      throw Error(ErrorKind::length_mismatch, "endpoint targets need k + 1 sets");

  BicanonicalPath out;
  std::vector<std::size_t> rank(g.order());
  bool all_exceeded = true;
  for (int attempt = 0; attempt < params.retry_limit; ++attempt) {
    const std::vector<std::size_t> *order = nullptr;
    if (attempt > 0) {
      std::iota(rank.begin(), rank.end(), 0);
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
      rng.shuffle(std::span<std::size_t>(rank));
      order = &rank;
    }
    BicanonicalSearch search(g, k, sets, s_sets, t_sets, rho, params.budget, order);
    const bool found = search.run();
    out.nodes += search.nodes();
    out.attempts = attempt + 1;
    if (found) {
      out.path = PowerPath(search.sequence(), 2 * k + 1);
      const VertexSet used = out.path.vertex_set(g.order());
      const auto &seq = out.path.vertices();
      if (s_sets && !s_sets->empty())
        out.s_check = is_extendible(g, Layer::gamma, rev(prefix(seq, 2 * s_sets->size())),
                                    subtract(*s_sets, used), rho);
      if (t_sets && !t_sets->empty())
        out.t_check = is_extendible(
            g, Layer::gamma,
            VertexTuple(seq.end() - static_cast<std::ptrdiff_t>(2 * t_sets->size()), seq.end()),
            subtract(*t_sets, used), rho);
      return out;
    }
    if (!search.exceeded()) {
      all_exceeded = false;
      break; // the whole tree was explored; reordering cannot help
    }
  }
  if (all_exceeded)
    throw Error(ErrorKind::budget_exceeded,
                "bicanonical path search ran out of budget in " +
                    std::to_string(out.attempts) + " attempts");
  throw Error(ErrorKind::not_found, "no bicanonical path with the required endpoints");
}

std::vector<PowerPath> connect_cliques(const LayeredGraph &g, int k,
                                       const std::vector<ConnectJob> &jobs,
                                       const VertexSet &used, const PipelineParams &params,
                                       std::uint64_t seed) {
  const std::size_t n = g.order();
  const std::size_t width = static_cast<std::size_t>(2 * k + 2);
  const std::size_t half = static_cast<std::size_t>(k + 1);

  VertexSet cliques(n);
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto &job = jobs[i];
    if (job.s.size() != width || job.t.size() != width)
      throw ConnectError(ErrorKind::invalid_endpoint, i, "endpoints must have 2k + 2 vertices");
    if (!is_clique(g, Layer::combined, job.s) || !is_clique(g, Layer::combined, job.t))
      throw ConnectError(ErrorKind::invalid_endpoint, i, "endpoint is not a clique");
    if (job.sets.size() != 2 * half + 2)
      throw ConnectError(ErrorKind::length_mismatch, i, "job needs 2k + 4 sets");
    VertexSet own = to_set(n, job.s);
    if (job.s != job.t) {
      const VertexSet tt = to_set(n, job.t);
      if (own.intersects(tt))
        throw ConnectError(ErrorKind::disjointness_violation, i, "s and t overlap");
      own |= tt;
    }
    if (own.intersects(cliques))
      throw ConnectError(ErrorKind::disjointness_violation, i, "cliques of two jobs overlap");
    cliques |= own;
  }

  std::vector<PowerPath> out;
  VertexSet taken = used | cliques;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto &job = jobs[i];
    if (job.s == job.t) {
      out.emplace_back(job.s, 2 * k + 1);
      continue;
    }
    const SetTuple first = prefix(job.sets, half);
    const SetTuple last = prefix(rev(job.sets), half);
    const auto s_ok = is_extendible(g, Layer::gamma, job.s, subtract(first, taken), params.rho);
    const auto t_ok =
        is_extendible(g, Layer::gamma, rev(job.t), subtract(last, taken), params.rho);
    if (!s_ok.extendible || !t_ok.extendible)
      throw ConnectError(ErrorKind::precondition_failed, i,
                         std::string(s_ok.extendible ? "rev(t)" : "s") + " is not extendible");

    SetTuple middle;
    for (std::size_t j = 1; j <= half; ++j)
      middle.push_back(common_neighborhood(g, Layer::gamma, suffix_from(job.s, 2 * j),
                                           job.sets[j - 1]));
    middle.push_back(job.sets[half]);
    middle.push_back(job.sets[half + 1]);
    for (std::size_t j = half; j >= 1; --j)
      middle.push_back(common_neighborhood(g, Layer::gamma, suffix_from(rev(job.t), 2 * j),
                                           last[j - 1]));
    middle = subtract(middle, taken);

    BicanonicalPath built;
    try {
      built = build_bicanonical_path(g, k, middle, VertexSet(n), VertexSet(n), params.rho,
                                     params, derive_seed(seed, i));
    } catch (const Error &e) {
      throw ConnectError(e.kind(), i, e.what());
    }
    VertexTuple full = concat(concat(job.s, built.path.vertices()), job.t);
    if (!is_power_path(g, full, 2 * k + 1))
      throw ConnectError(ErrorKind::invalid_path, i, "joined path fails validation");
    taken |= built.path.vertex_set(n);
    out.emplace_back(std::move(full), 2 * k + 1);
  }
  return out;
}

void write_gadget(std::ostream &out, const AbsorberGadget &gadget) {
  out << to_string(gadget.path) << '\n';
  out << "absorbable:";
  gadget.absorbable.for_each([&](Vertex v) { out << ' ' << v; });
  out << '\n';
  for (const auto &slot : gadget.slots)
    out << "slot " << slot.x << ' ' << slot.after << '\n';
}

AbsorberGadget read_gadget(std::istream &in, std::size_t n) {
  AbsorberGadget gadget;
  gadget.absorbable = VertexSet(n);
  std::string line;
  std::size_t lineno = 0;
  bool have_path = false;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#')
      continue;
    std::istringstream words(line);
    std::string head;
    words >> head;
    auto vertex = [&](const std::string &tok) -> Vertex {
      std::size_t used = 0;
      unsigned long long v = 0;
      try {
        v = std::stoull(tok, &used);
      } catch (const std::exception &) {
        used = 0;
      }
      if (used != tok.size() || tok.empty() || tok[0] == '-' || v >= n)
        throw ParseError(lineno, "bad vertex '" + tok + "'");
      return static_cast<Vertex>(v);
    };
    if (head.rfind("r=", 0) == 0) {
      try {
        gadget.path = parse_power_path(line);
      } catch (const Error &e) {
        throw ParseError(lineno, e.what());
      }
      for (auto v : gadget.path.vertices())
        if (v >= n)
          throw ParseError(lineno, "path vertex outside [0, n)");
      have_path = true;
    } else if (head == "absorbable:") {
      std::string tok;
      while (words >> tok)
        gadget.absorbable.insert(vertex(tok));
    } else if (head == "slot") {
      std::string xs;
      std::string after;
      if (!(words >> xs >> after) || !(words >> std::ws).eof())
        throw ParseError(lineno, "expected 'slot <x> <after>'");
      const Vertex x = vertex(xs);
      std::size_t used = 0;
      std::size_t pos = 0;
      try {
        pos = std::stoull(after, &used);
      } catch (const std::exception &) {
        used = 0;
      }
      if (used != after.size() || after[0] == '-')
        throw ParseError(lineno, "bad slot position '" + after + "'");
      gadget.slots.push_back({x, pos});
    } else {
      throw ParseError(lineno, "unexpected line");
    }
  }
  if (!have_path)
    throw ParseError(lineno, "missing path line");
  return gadget;
}

PowerPath absorb(const LayeredGraph &g, const AbsorberGadget &gadget, const VertexSet &x_star) {
  if (!x_star.is_subset_of(gadget.absorbable))
    throw Error(ErrorKind::invalid_argument, "X* is not a subset of the absorbable set");
  std::vector<Slot> chosen;
  x_star.for_each([&](Vertex x) {
    auto it = std::find_if(gadget.slots.begin(), gadget.slots.end(),
                           [&](const Slot &s) { return s.x == x; });
    if (it == gadget.slots.end())
      throw Error(ErrorKind::not_absorbable, "no slot for vertex " + std::to_string(x));
    chosen.push_back(*it);
  });
  std::sort(chosen.begin(), chosen.end(),
            [](const Slot &a, const Slot &b) { return a.after > b.after; });
  VertexTuple seq = gadget.path.vertices();
  for (const auto &slot : chosen) {
    if (slot.after > seq.size())
      throw Error(ErrorKind::not_absorbable, "slot beyond the end of the path");
    seq.insert(seq.begin() + static_cast<std::ptrdiff_t>(slot.after), slot.x);
  }
  const int r = gadget.path.r();
  if (!is_power_path(g, seq, r))
    throw Error(ErrorKind::not_absorbable, "spliced sequence is not a power path");
  PowerPath out(std::move(seq), r);
  if (gadget.path.size() >= static_cast<std::size_t>(r) + 1 &&
      endpoints(out) != endpoints(gadget.path))
    throw Error(ErrorKind::not_absorbable, "splicing moved an endpoint");
  return out;
}

bool verify_absorbing(const LayeredGraph &g, const AbsorberGadget &gadget, VerifyMode mode,
                      const SearchBudget &budget) {
  const auto xs = gadget.absorbable.to_vector();
  if (xs.size() > 12)
    throw Error(ErrorKind::too_large, "verify_absorbing supports at most 12 absorbable vertices");
  const std::size_t n = g.order();
  const VertexSet base = gadget.path.vertex_set(n);
  if (base.intersects(gadget.absorbable) || !is_power_path(g, gadget.path.vertices(),
                                                           gadget.path.r()))
    return false;
  const auto ends = endpoints(gadget.path);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << xs.size()); ++mask) {
    VertexSet x_star(n);
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (mask >> i & 1)
        x_star.insert(xs[i]);
    if (mode == VerifyMode::certificate) {
      try {
        const PowerPath p = absorb(g, gadget, x_star);
        if (p.vertex_set(n) != (base | x_star) || endpoints(p) != ends)
          return false;
      } catch (const Error &e) {
        if (e.kind() != ErrorKind::not_absorbable)
          throw;
        return false;
      }
    } else {
      const auto res = find_power_path_between(g, ends.first, ends.second, gadget.path.r(),
                                               base | x_star, budget, true);
      if (res.verdict != Verdict::found)
        return false;
    }
  }
  return true;
}

namespace {

std::size_t band_low(double target, double tol) {
  return static_cast<std::size_t>(std::max(0.0, std::floor((1.0 - tol) * target + 1e-9)));
}

std::size_t band_high(double target, double tol) {
  return static_cast<std::size_t>(std::max(0.0, std::ceil((1.0 + tol) * target - 1e-9)));
}

std::size_t ceil_frac(double fraction, std::size_t size) {
  return static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(size) - 1e-9));
}

VertexTuple last_clique(const VertexTuple &seq, std::size_t width) {
  return VertexTuple(seq.end() - static_cast<std::ptrdiff_t>(width), seq.end());
}

// Picks `count` members of `pool` in a seeded order, taking vertices outside
// `avoid` first. Returns nullopt when the pool is too small.
std::optional<VertexSet> pick(const VertexSet &pool, std::size_t count, const VertexSet &avoid,
                              Rng &rng) {
  if (pool.size() < count)
    return std::nullopt;
  auto first = (pool - avoid).to_vector();
  auto second = (pool & avoid).to_vector();
  rng.shuffle(std::span<Vertex>(first));
  rng.shuffle(std::span<Vertex>(second));
  VertexSet out(pool.universe());
  for (auto *part : {&first, &second})
    for (Vertex v : *part)
      if (out.size() < count)
        out.insert(v);
  return out;
}

bool recoverable(ErrorKind kind) {
  return kind == ErrorKind::not_found || kind == ErrorKind::budget_exceeded ||
         kind == ErrorKind::invalid_path || kind == ErrorKind::not_absorbable;
}

// One segment of the local construction after the first: a joint through the
// current end clique, then either a group of x-gadgets or `reps` copies of V'.
struct Segment {
  std::vector<Vertex> xs;
  std::size_t reps = 0;
};

} // namespace

LocalAbsorber build_absorber_local(const LayeredGraph &g, int k, const VertexSet &x,
                                   const SetTuple &v, const VertexSet &y, const VertexSet &q,
                                   double alpha, const PipelineParams &params,
                                   std::uint64_t seed, const LocalAbsorberOptions &options) {
  params.validate();
  const std::size_t n = g.order();
  const std::size_t half = static_cast<std::size_t>(k + 1);
  const std::size_t width = 2 * half;
  const std::size_t block = 2 * width; // vertices of one (N(x), N(x)) block
  if (k < 1 || v.size() != half)
    throw Error(ErrorKind::invalid_argument, "need k >= 1 and k + 1 classes");
  VertexSet seen = x;
  for (const auto *s : {&y})
    if (s->intersects(seen))
      throw Error(ErrorKind::disjointness_violation, "X and Y overlap");
  seen |= y;
  for (const auto &cls : v) {
    if (cls.intersects(seen))
      throw Error(ErrorKind::disjointness_violation, "classes, X and Y must be disjoint");
    seen |= cls;
  }
  x.for_each([&](Vertex xv) {
    for (const auto &cls : v)
      if (static_cast<double>(degree_into(g, Layer::gamma, xv, cls)) + 1e-9 <
          alpha * static_cast<double>(cls.size()))
        throw Error(ErrorKind::precondition_failed,
                    "vertex " + std::to_string(xv) + " has too few neighbours in a class");
  });

  const SetTuple vp = subtract(v, q);
  const VertexSet yfree = y - q;
  const double lam_y = params.lambda * static_cast<double>(y.size());
  if (static_cast<double>(yfree.size()) + 1e-9 < lam_y)
    throw Error(ErrorKind::infeasible_params, "fewer than lambda |Y| vertices of Y avoid Q");

  const std::size_t group_size = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(3.0 * (1.0 - params.gamma) / params.lambda + 1e-9)));
  const auto xs = x.to_vector();
  std::vector<std::vector<Vertex>> groups;
  for (std::size_t i = 0; i < xs.size(); i += group_size)
    groups.emplace_back(xs.begin() + static_cast<std::ptrdiff_t>(i),
                        xs.begin() + static_cast<std::ptrdiff_t>(std::min(xs.size(), i + group_size)));

  // Usage is the same in every class: 4 per absorbable vertex, 2 per joint
  // and 2 per copy of V'. Choose the total so that every leftover lands in
  // its band.
  std::vector<double> targets(half);
  for (std::size_t i = 0; i < half; ++i)
    targets[i] = options.leftover_targets ? (*options.leftover_targets).at(i)
                                          : params.gamma * static_cast<double>(v[i].size());
  std::vector<std::size_t> band_lo(half), band_hi(half);
  for (std::size_t i = 0; i < half; ++i) {
    band_lo[i] = options.leftover_bands ? (*options.leftover_bands).at(i).first
                                        : band_low(targets[i], params.tol);
    band_hi[i] = options.leftover_bands ? (*options.leftover_bands).at(i).second
                                        : band_high(targets[i], params.tol);
  }
  long long lo_use = groups.empty() ? 2 : static_cast<long long>(4 * xs.size() + 2 * (groups.size() - 1));
  const long long base_use = groups.empty() ? 0 : lo_use;
  long long hi_use = std::numeric_limits<long long>::max();
  double ideal = 0.0;
  for (std::size_t i = 0; i < half; ++i) {
    const auto a = static_cast<long long>(vp[i].size());
    lo_use = std::max(lo_use, a - static_cast<long long>(band_hi[i]));
    hi_use = std::min(hi_use, a - static_cast<long long>(band_lo[i]));
    ideal += (static_cast<double>(a) - targets[i]) / static_cast<double>(half);
  }
  if (lo_use % 2 != 0)
    ++lo_use;
  if (lo_use > hi_use)
    throw Error(ErrorKind::infeasible_params,
                "no common usage puts every leftover in its band (need " + std::to_string(lo_use) +
                    ", at most " + std::to_string(hi_use) + ")");
  long long use = lo_use;
  for (long long u = lo_use; u <= hi_use; u += 2)
    if (std::abs(static_cast<double>(u) - ideal) < std::abs(static_cast<double>(use) - ideal))
      use = u;

  long long extra = use - base_use;
  std::size_t first_reps = 0;
  if (groups.empty()) {
    first_reps = static_cast<std::size_t>(std::min<long long>(extra / 2, 2 * static_cast<long long>(group_size)));
    extra -= 2 * static_cast<long long>(first_reps);
  }
  std::vector<Segment> segments;
  for (std::size_t i = 1; i < groups.size(); ++i)
    segments.push_back({groups[i], 0});
  const long long step_cap = 2 + 4 * static_cast<long long>(group_size);
  while (extra > 0) {
    const long long step = std::min(extra, step_cap);
    segments.push_back({{}, static_cast<std::size_t>((step - 2) / 2)});
    extra -= step;
  }
  const std::size_t y_budget = static_cast<std::size_t>(std::floor(lam_y + 1e-9));
  if (2 * segments.size() > y_budget)
    throw Error(ErrorKind::infeasible_params,
                "joints need " + std::to_string(2 * segments.size()) + " vertices of Y, budget " +
                    std::to_string(y_budget));

  // Reservations that keep rev(s) extendible until the end.
  const std::size_t y_reserve = ceil_frac(params.rho, yfree.size());
  std::vector<std::size_t> reserve(half + 1, 0); // indexed by 1-based class
  for (std::size_t c = 2; c <= half; ++c) {
    reserve[c] = ceil_frac(params.rho, band_hi[c - 1]);
    if (static_cast<long long>(vp[c - 1].size()) - use < static_cast<long long>(reserve[c]))
      throw Error(ErrorKind::infeasible_params, "leftover too small for the endpoint reserve");
  }
  if (yfree.size() < y_reserve + 2 * segments.size())
    throw Error(ErrorKind::infeasible_params, "Y too small for joints and the endpoint reserve");

  SetTuple s_final{yfree};
  SetTuple t_final{yfree};
  for (std::size_t c = half; c >= 2; --c)
    s_final.push_back(vp[c - 1]);
  for (std::size_t c = 1; c <= half - 1; ++c)
    t_final.push_back(vp[c - 1]);

  auto neighbourhood_tuple = [&](Vertex xv, const VertexSet &blocked) {
    SetTuple out;
    for (const auto &cls : vp)
      out.push_back(g.neighbors(xv, Layer::gamma) & (cls - blocked));
    return out;
  };

  std::optional<Error> last_error;
  for (int attempt = 0; attempt < params.retry_limit; ++attempt) {
    const std::uint64_t aseed = derive_seed(seed, static_cast<std::uint64_t>(attempt));
    Rng rng(aseed);
    try {
      auto ypool = yfree.to_vector();
      rng.shuffle(std::span<Vertex>(ypool));
      VertexSet yprime(n);
      for (std::size_t i = 0; i < ypool.size() && yprime.size() < ceil_frac(params.lambda, y.size()); ++i)
        yprime.insert(ypool[i]);
      SetTuple t_mid{yprime};
      for (std::size_t c = 1; c <= half - 1; ++c)
        t_mid.push_back(vp[c - 1]);

      VertexTuple seq;
      std::vector<Slot> slots;
      VertexSet used(n);

      // First segment.
      SetTuple sets;
      if (!groups.empty()) {
        for (std::size_t b = 0; b < groups[0].size(); ++b) {
          const auto nx = neighbourhood_tuple(groups[0][b], VertexSet(n));
          sets = concat(concat(sets, nx), nx);
          slots.push_back({groups[0][b], b * block + width});
        }
      } else {
        for (std::size_t rep = 0; rep < first_reps; ++rep)
          sets = concat(sets, vp);
      }
      const bool single = segments.empty();
      auto first = build_bicanonical_path(g, k, sets, yprime, yprime, params.rho, params,
                                          derive_seed(aseed, 0),
                                          {s_final, single ? t_final : t_mid});
      seq = first.path.vertices();
      used = first.path.vertex_set(n);

      VertexSet reserved(n);
      const VertexTuple rs = rev(prefix(seq, width));
      for (std::size_t i = 1; i <= half; ++i) {
        const std::size_t size = i == 1 ? y_reserve : reserve[half + 2 - i];
        const VertexSet pool =
            common_neighborhood(g, Layer::gamma, suffix_from(rs, 2 * i), s_final[i - 1] - used - reserved);
        auto chosen = pick(pool, size, yprime, rng);
        if (!chosen)
          throw Error(ErrorKind::not_found, "start clique cannot reserve its neighbourhood");
        reserved |= *chosen;
      }

      for (std::size_t si = 0; si < segments.size(); ++si) {
        const auto &seg = segments[si];
        const VertexSet blocked = used | reserved;
        const VertexTuple t = last_clique(seq, width);
        SetTuple step;
        for (std::size_t i = 1; i <= half; ++i)
          step.push_back(common_neighborhood(g, Layer::gamma, suffix_from(t, 2 * i),
                                             t_mid[i - 1] - blocked));
        step.push_back(vp[half - 1] - blocked);
        const std::size_t offset = seq.size() + 2 * (half + 1);
        for (std::size_t b = 0; b < seg.xs.size(); ++b) {
          const auto nx = neighbourhood_tuple(seg.xs[b], blocked);
          step = concat(concat(step, nx), nx);
          slots.push_back({seg.xs[b], offset + b * block + width});
        }
        for (std::size_t rep = 0; rep < seg.reps; ++rep)
          step = concat(step, subtract(vp, blocked));
        const bool last = si + 1 == segments.size();
        SetTuple t_target = last ? subtract(t_final, used) : subtract(t_mid, blocked);
        auto part = build_bicanonical_path(g, k, step, VertexSet(n), VertexSet(n), params.rho,
                                           params, derive_seed(aseed, si + 1),
                                           {SetTuple{}, t_target});
        seq = concat(seq, part.path.vertices());
        used |= part.path.vertex_set(n);
      }

      LocalAbsorber out;
      out.attempts = attempt + 1;
      if (!is_power_path(g, seq, 2 * k + 1))
        throw Error(ErrorKind::invalid_path, "joined segments do not form a power path");
      out.gadget.path = PowerPath(seq, 2 * k + 1);
      out.gadget.absorbable = x;
      out.gadget.slots = slots;
      for (std::size_t i = 0; i < half; ++i) {
        const std::size_t left = (vp[i] - used).size();
        out.leftover.push_back(left);
        if (left < band_lo[i] || left > band_hi[i])
          throw Error(ErrorKind::not_found, "leftover missed its band");
      }
      out.y_used = (y & used).size();
      if (out.y_used > y_budget)
        throw Error(ErrorKind::not_found, "Y usage above lambda |Y|");
      out.s_check = is_extendible(g, Layer::gamma, rev(prefix(seq, width)),
                                  subtract(s_final, used), params.rho);
      out.t_check = is_extendible(g, Layer::gamma, last_clique(seq, width),
                                  subtract(t_final, used), params.rho);
      if (!out.s_check.extendible || !out.t_check.extendible)
        throw Error(ErrorKind::not_found, "an endpoint lost extendibility");
      absorb(g, out.gadget, x);
      return out;
    } catch (const Error &e) {
      if (!recoverable(e.kind()))
        throw;
      last_error = e;
    }
  }
  throw *last_error;
}

namespace {

SetTuple pick_classes(const std::vector<VertexSet> &w, std::initializer_list<std::size_t> head,
                      const std::vector<std::size_t> &tail) {
  SetTuple out;
  for (std::size_t i : head)
    out.push_back(w[i]);
  for (std::size_t i : tail)
    out.push_back(w[i]);
  return out;
}

// Reserves rho-sized neighbourhoods N(c^{>=2i}, sets_i) for a clique c read
// in the given orientation. Reservations of different cliques may overlap;
// vertices outside `avoid` are preferred.
std::optional<VertexSet> reserve_for(const LayeredGraph &g, const VertexTuple &clique,
                                     const SetTuple &sets, const std::vector<std::size_t> &sizes,
                                     const VertexSet &avoid, Rng &rng) {
  VertexSet out(g.order());
  for (std::size_t i = 1; i <= sets.size(); ++i) {
    const VertexSet pool = common_neighborhood(g, Layer::gamma, suffix_from(clique, 2 * i),
                                               sets[i - 1] - out);
    auto chosen = pick(pool, sizes[i - 1], avoid, rng);
    if (!chosen)
      return std::nullopt;
    out |= *chosen;
  }
  return out;
}

} // namespace

AbsorbingCovering absorbing_covering(const LayeredGraph &g, int k, const VertexSet &x,
                                     const std::vector<VertexSet> &w, const LayeredGraph &reduced,
                                     double alpha, const PipelineParams &params,
                                     std::uint64_t seed) {
  params.validate();
  const std::size_t n = g.order();
  const std::size_t t = w.size();
  const std::size_t half = static_cast<std::size_t>(k + 1);
  const std::size_t width = 2 * half;
  if (k < 1 || t == 0 || t % half != 0)
    throw Error(ErrorKind::precondition_failed, "the number of classes must be a multiple of k + 1");
  if (reduced.order() != t)
    throw Error(ErrorKind::invalid_argument, "reduced graph order differs from the class count");
  for (std::size_t i = 0; i < t; ++i)
    for (int j = 1; j <= k; ++j)
      if (!reduced.adjacent(static_cast<Vertex>(i), static_cast<Vertex>((i + j) % t), Layer::combined))
        throw Error(ErrorKind::precondition_failed, "classes are not ordered along a k-th power cycle");
  const double need_deg = (static_cast<double>(k) / (k + 1) + alpha) * static_cast<double>(t);
  if (static_cast<double>(min_degree(reduced, Layer::combined)) + 1e-9 < need_deg)
    throw Error(ErrorKind::precondition_failed, "reduced graph minimum degree too low");
  VertexSet all_w(n);
  for (const auto &cls : w) {
    if (cls.intersects(all_w) || cls.intersects(x))
      throw Error(ErrorKind::disjointness_violation, "classes and X must be disjoint");
    all_w |= cls;
  }

  const std::size_t blocks = t / half;
  auto block_class = [&](std::size_t j, std::size_t i) { return j * half + i; }; // i 0-based
  const double eta = alpha / 2.0;
  const double thr = eta * static_cast<double>(all_w.size()) / static_cast<double>(t);

  AbsorbingCovering out;
  std::vector<VertexSet> members(blocks, VertexSet(n));
  x.for_each([&](Vertex xv) {
    std::optional<std::size_t> best;
    for (std::size_t j = 0; j < blocks; ++j) {
      bool ok = true;
      for (std::size_t i = 0; i < half && ok; ++i)
        ok = static_cast<double>(degree_into(g, Layer::gamma, xv, w[block_class(j, i)])) + 1e-9 >= thr;
      if (ok && (!best || members[j].size() < members[*best].size()))
        best = j;
    }
    if (!best)
      throw Error(ErrorKind::not_absorbable,
                  "vertex " + std::to_string(xv) + " has no block with enough neighbours");
    members[*best].insert(xv);
    out.phi.push_back(*best);
  });

  std::vector<std::size_t> psi_uses(t, 0);
  for (std::size_t j = 0; j < blocks; ++j) {
    std::optional<std::size_t> best;
    for (std::size_t c = 0; c < t; ++c) {
      if (c / half == j)
        continue;
      bool ok = true;
      for (std::size_t i = 0; i < half && ok; ++i)
        ok = reduced.adjacent(static_cast<Vertex>(c), static_cast<Vertex>(block_class(j, i)), Layer::combined);
      if (ok && (!best || (j > 0 && psi_uses[c] < psi_uses[*best])))
        best = c;
    }
    if (!best)
      throw Error(ErrorKind::no_common_neighbor_class,
                  "block " + std::to_string(j + 1) + " has no common neighbour class");
    out.psi.push_back(*best);
    ++psi_uses[*best];
  }
  out.z = out.psi[0];
  const std::size_t z = out.z;

  std::vector<double> goal(t), hi(t);
  std::vector<std::size_t> reserve_size(t);
  for (std::size_t c = 0; c < t; ++c) {
    goal[c] = params.gamma * static_cast<double>(w[c].size());
    hi[c] = static_cast<double>(band_high(goal[c], params.tol));
    reserve_size[c] = ceil_frac(params.rho, static_cast<std::size_t>(hi[c]));
  }
  // Later usage of each class once its own block is built: the connections
  // take 4 from every class, the final clique 2 more from the first block,
  // and every block using a class as Y takes 4 for its joints.
  std::vector<double> later(t, 4.0);
  for (std::size_t i = 0; i < half; ++i)
    later[i] += 2.0;
  for (std::size_t j = 0; j < blocks; ++j)
    later[out.psi[j]] += 4.0;
  std::vector<double> adjust(t, 0.0);

  const std::vector<std::size_t> upper_desc = [&] {
    std::vector<std::size_t> v;
    for (std::size_t i = half; i >= 2; --i)
      v.push_back(i - 1);
    return v;
  }();
  const std::vector<std::size_t> lower_asc = [&] {
    std::vector<std::size_t> v;
    for (std::size_t i = 1; i <= half - 1; ++i)
      v.push_back(i - 1);
    return v;
  }();
  auto in_block = [&](std::size_t j, const std::vector<std::size_t> &idx) {
    std::vector<std::size_t> v;
    for (std::size_t i : idx)
      v.push_back(block_class(j, i));
    return v;
  };
  auto sizes_of = [&](const SetTuple &, std::size_t y_class, const std::vector<std::size_t> &classes) {
    std::vector<std::size_t> v{reserve_size[y_class]};
    for (std::size_t c : classes)
      v.push_back(reserve_size[c]);
    return v;
  };

  std::optional<Error> last_error;
  for (int attempt = 0; attempt < params.retry_limit; ++attempt) {
    const std::uint64_t aseed = derive_seed(seed, static_cast<std::uint64_t>(attempt));
    Rng rng(aseed);
    try {
      std::vector<LocalAbsorber> locals;
      VertexSet paths(n), reservations(n);
      std::vector<VertexSet> res_s(blocks, VertexSet(n)), res_t(blocks, VertexSet(n));
      for (std::size_t j = 0; j < blocks; ++j) {
        const VertexSet q = paths | reservations;
        SetTuple v;
        LocalAbsorberOptions opts;
        opts.leftover_targets.emplace();
        opts.leftover_bands.emplace();
        for (std::size_t i = 0; i < half; ++i) {
          const std::size_t c = block_class(j, i);
          v.push_back(w[c]);
          const double shift =
              later[c] + adjust[c] - static_cast<double>((w[c] & reservations).size());
          auto shifted = [&](std::size_t bound) {
            return static_cast<std::size_t>(
                std::max(0LL, static_cast<long long>(bound) + std::llround(shift)));
          };
          opts.leftover_targets->push_back(goal[c] + shift);
          opts.leftover_bands->emplace_back(shifted(band_low(goal[c], params.tol)),
                                            shifted(band_high(goal[c], params.tol)));
        }
        auto local = build_absorber_local(g, k, members[j], v, w[out.psi[j]], q, eta, params,
                                          derive_seed(aseed, 100 + j), opts);
        paths |= local.gadget.path.vertex_set(n);
        const auto &seq = local.gadget.path.vertices();
        const auto s_cls = in_block(j, upper_desc);
        const auto t_cls = in_block(j, lower_asc);
        const SetTuple s_sets = subtract(pick_classes(w, {out.psi[j]}, s_cls), paths);
        const SetTuple t_sets = subtract(pick_classes(w, {out.psi[j]}, t_cls), paths);
        auto rs = reserve_for(g, rev(prefix(seq, width)), s_sets, sizes_of(s_sets, out.psi[j], s_cls),
                              reservations, rng);
        if (!rs)
          throw Error(ErrorKind::not_found, "cannot reserve around the start of a block path");
        reservations |= *rs;
        auto rt = reserve_for(g, last_clique(seq, width), t_sets, sizes_of(t_sets, out.psi[j], t_cls),
                              reservations, rng);
        if (!rt)
          throw Error(ErrorKind::not_found, "cannot reserve around the end of a block path");
        reservations |= *rt;
        res_s[j] = *rs;
        res_t[j] = *rt;
        locals.push_back(std::move(local));
      }

      // Closing clique on the first block, with W_z on both sides.
      const VertexSet taken = paths | reservations;
      SetTuple first_block;
      for (std::size_t i = 0; i < half; ++i)
        first_block.push_back(w[i] - taken);
      const std::vector<std::size_t> c_s_cls = upper_desc; // block 0
      const std::vector<std::size_t> c_t_cls = lower_asc;
      auto closing = build_bicanonical_path(
          g, k, first_block, w[z] - taken, w[z] - taken, params.rho, params, derive_seed(aseed, 7),
          {subtract(pick_classes(w, {z}, c_s_cls), taken), subtract(pick_classes(w, {z}, c_t_cls), taken)});
      const VertexTuple c = closing.path.vertices();
      paths |= closing.path.vertex_set(n);
      const SetTuple c_s_sets = subtract(pick_classes(w, {z}, c_s_cls), paths);
      const SetTuple c_t_sets = subtract(pick_classes(w, {z}, c_t_cls), paths);
      auto rcs = reserve_for(g, rev(c), c_s_sets, sizes_of(c_s_sets, z, c_s_cls), reservations, rng);
      if (!rcs)
        throw Error(ErrorKind::not_found, "cannot reserve around the closing clique");
      reservations |= *rcs;
      auto rct = reserve_for(g, c, c_t_sets, sizes_of(c_t_sets, z, c_t_cls), reservations, rng);
      if (!rct)
        throw Error(ErrorKind::not_found, "cannot reserve around the closing clique");
      reservations |= *rct;

      // Connections t_j -> s_{j+1}, and t_last -> c.
      std::vector<ConnectJob> jobs;
      for (std::size_t j = 0; j < blocks; ++j) {
        const bool final_job = j + 1 == blocks;
        const auto &pj = locals[j].gadget.path.vertices();
        const VertexSet own_t = res_t[j];
        const VertexSet own_s = final_job ? *rcs : res_s[j + 1];
        const VertexSet other = reservations - own_t - own_s;
        // Other cliques' reservations are avoided unless that leaves a set
        // too thin to route through; a job takes only two vertices per set.
        auto spare = [&](const SetTuple &raw) {
          SetTuple out_sets;
          for (const auto &set : raw) {
            const VertexSet free = set - paths;
            const VertexSet cut = free - other;
            const std::size_t floor_size =
                std::max<std::size_t>(2, ceil_frac(params.rho, free.size()));
            out_sets.push_back(cut.size() >= floor_size ? cut : free);
          }
          return out_sets;
        };
        SetTuple s_side_raw;
        VertexTuple s_clique;
        std::size_t next_first;
        if (final_job) {
          s_side_raw = pick_classes(w, {z}, c_s_cls);
          s_clique = c;
          next_first = 0;
        } else {
          s_side_raw = pick_classes(w, {out.psi[j + 1]}, in_block(j + 1, upper_desc));
          s_clique = prefix(locals[j + 1].gadget.path.vertices(), width);
          next_first = block_class(j + 1, 0);
        }
        SetTuple sets = pick_classes(w, {out.psi[j]}, in_block(j, lower_asc));
        sets.push_back(w[block_class(j, half - 1)]);
        sets.push_back(w[next_first]);
        sets = spare(concat(sets, rev(s_side_raw)));
        jobs.push_back({last_clique(pj, width), s_clique, sets});
      }
      auto connections = connect_cliques(g, k, jobs, paths, params, derive_seed(aseed, 9));

      VertexTuple seq = locals[0].gadget.path.vertices();
      std::vector<Slot> slots = locals[0].gadget.slots;
      for (std::size_t j = 0; j < blocks; ++j) {
        const auto &cv = connections[j].vertices();
        seq.insert(seq.end(), cv.begin() + static_cast<std::ptrdiff_t>(width), cv.end());
        if (j + 1 < blocks) {
          const std::size_t lc = seq.size();
          const auto &pv = locals[j + 1].gadget.path.vertices();
          seq.insert(seq.end(), pv.begin() + static_cast<std::ptrdiff_t>(width), pv.end());
          for (const auto &sl : locals[j + 1].gadget.slots)
            slots.push_back({sl.x, lc + sl.after - width});
        }
      }
      if (!is_power_path(g, seq, 2 * k + 1))
        throw Error(ErrorKind::invalid_path, "merged covering path is not a power path");
      out.gadget.path = PowerPath(seq, 2 * k + 1);
      out.gadget.absorbable = x;
      out.gadget.slots = slots;
      out.attempts = attempt + 1;

      const VertexSet on_path = out.gadget.path.vertex_set(n);
      out.leftover.clear();
      bool in_band = true;
      std::vector<double> miss(t, 0.0);
      for (std::size_t c = 0; c < t; ++c) {
        const std::size_t left = (w[c] - on_path).size();
        out.leftover.push_back(left);
        miss[c] = static_cast<double>(left) - goal[c];
        if (left < band_low(goal[c], params.tol) || left > band_high(goal[c], params.tol))
          in_band = false;
      }
      if (!in_band) {
        for (std::size_t c = 0; c < t; ++c)
          adjust[c] -= miss[c];
        throw Error(ErrorKind::not_found, "a leftover missed its band; recalibrating");
      }
      out.s_check = is_extendible(g, Layer::gamma, rev(prefix(seq, width)),
                                  subtract(pick_classes(w, {z}, c_s_cls), on_path), params.rho);
      out.t_check = is_extendible(g, Layer::gamma, last_clique(seq, width),
                                  subtract(pick_classes(w, {z}, c_t_cls), on_path), params.rho);
      if (!out.s_check.extendible || !out.t_check.extendible)
        throw Error(ErrorKind::not_found, "an endpoint of the covering lost extendibility");
      absorb(g, out.gadget, x);
      return out;
    } catch (const Error &e) {
      if (!recoverable(e.kind()) && e.kind() != ErrorKind::infeasible_params)
        throw;
      last_error = e;
    }
  }
  throw *last_error;
}

namespace {

struct StageFailure {
  std::string stage;
  std::string message;
};

LayeredGraph relabel_reduced(const LayeredGraph &r, const VertexTuple &order) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (std::size_t j = i + 1; j < order.size(); ++j)
      if (r.adjacent(order[i], order[j], Layer::combined))
        edges.push_back({static_cast<Vertex>(i), static_cast<Vertex>(j)});
  return LayeredGraph(order.size(), edges);
}

bool dense_into(const LayeredGraph &g, const VertexSet &target, double ratio) {
  const double need = ratio * static_cast<double>(target.size());
  for (Vertex v = 0; v < g.order(); ++v)
    if (static_cast<double>(degree_into(g, Layer::gamma, v, target)) + 1e-9 < need)
      return false;
  return true;
}

SetTuple side_sets(const std::vector<VertexSet> &cls, std::size_t z, bool start, int k,
                   const VertexSet &minus) {
  SetTuple out{cls[z] - minus};
  const std::size_t half = static_cast<std::size_t>(k + 1);
  if (start)
    for (std::size_t i = half; i >= 2; --i)
      out.push_back(cls[i - 1] - minus);
  else
    for (std::size_t i = 1; i <= half - 1; ++i)
      out.push_back(cls[i - 1] - minus);
  return out;
}

} // namespace

PipelineResult full_pipeline(const LayeredGraph &g, int k, const Partition &partition,
                             double alpha, const PipelineParams &params, std::uint64_t seed) {
  params.validate();
  partition.validate();
  const std::size_t n = g.order();
  const std::size_t half = static_cast<std::size_t>(k + 1);
  const std::size_t width = 2 * half;
  if (k < 1 || partition.universe() != n)
    throw Error(ErrorKind::invalid_argument, "partition universe differs from the graph order");

  PipelineResult result;
  auto note = [&](const std::string &stage, const std::string &text) {
    result.trace.push_back(stage + ": " + text);
  };
  RegularityOptions ropt;
  ropt.seed = seed;

  const auto form = check_degree_form(g, Layer::gamma, partition, params.eps, params.d, nullptr, ropt);
  if (!form.ok()) {
    std::string why;
    for (const auto &v : form.violations)
      why += (why.empty() ? "" : "; ") + v;
    throw Error(ErrorKind::precondition_failed, "partition is not in degree form: " + why);
  }
  note("degree_form", "ok");

  const std::string *stage = nullptr;
  static const std::string stages[] = {"truncation", "reduced_graph", "k_cycle", "split",
                                       "covering_W", "covering_X", "connect", "absorb", "validate"};
  try {
    stage = &stages[0];
    VertexSet v0 = partition.exceptional;
    std::vector<VertexSet> classes = partition.classes;
    while (classes.size() % half != 0) {
      v0 |= classes.back();
      classes.pop_back();
    }
    if (classes.empty())
      throw Error(ErrorKind::precondition_failed, "fewer than k + 1 classes");
    note(*stage, std::to_string(classes.size()) + " classes kept, |V0| = " + std::to_string(v0.size()));

    stage = &stages[1];
    const Partition kept{v0, classes};
    const auto reduced = reduced_graph(g, Layer::gamma, kept, params.eps, params.d, ropt);
    const std::size_t t = classes.size();
    const double need = (static_cast<double>(k) / (k + 1) + alpha / 4.0) * static_cast<double>(t);
    const std::size_t delta = min_degree(reduced.graph, Layer::combined);
    if (static_cast<double>(delta) + 1e-9 < need)
      throw Error(ErrorKind::precondition_failed,
                  "delta(R) = " + std::to_string(delta) + " below " + format_double(need));
    note(*stage, "delta(R) = " + std::to_string(delta));

    stage = &stages[2];
    const auto cyc = find_power_ham_cycle(reduced.graph, k, params.budget);
    if (cyc.verdict != Verdict::found)
      throw Error(cyc.verdict == Verdict::budget_exceeded ? ErrorKind::budget_exceeded
                                                          : ErrorKind::not_found,
                  "no k-th power of a Hamilton cycle in R");
    const LayeredGraph r = relabel_reduced(reduced.graph, cyc.order);
    std::vector<VertexSet> ordered;
    for (Vertex i : cyc.order)
      ordered.push_back(classes[i]);
    note(*stage, "found");

    stage = &stages[3];
    std::vector<VertexSet> xc, wc;
    VertexSet x_all(n), w_all(n);
    const double ratio = static_cast<double>(k) / (k + 1) + alpha / 2.0;
    bool split_ok = false;
    int draws = 0;
    for (int attempt = 0; attempt < params.retry_limit && !split_ok; ++attempt) {
      ++draws;
      Rng rng(derive_seed(seed, 1000 + static_cast<std::uint64_t>(attempt)));
      xc.clear();
      wc.clear();
      x_all = VertexSet(n);
      w_all = VertexSet(n);
      for (const auto &cls : ordered) {
        auto members = cls.to_vector();
        rng.shuffle(std::span<Vertex>(members));
        const auto take = static_cast<std::size_t>(std::lround(params.xi * static_cast<double>(members.size())));
        VertexSet xi(n), wi(n);
        for (std::size_t i = 0; i < members.size(); ++i)
          (i < take ? xi : wi).insert(members[i]);
        xc.push_back(xi);
        wc.push_back(wi);
        x_all |= xi;
        w_all |= wi;
      }
      split_ok = dense_into(g, w_all, ratio) && dense_into(g, x_all, ratio);
    }
    result.retries += draws - 1;
    if (!split_ok)
      throw Error(ErrorKind::not_found, "no split keeps every degree into X and W");
    note(*stage, "|X| = " + std::to_string(x_all.size()) + ", |W| = " + std::to_string(w_all.size()));

    stage = &stages[4];
    const auto p1 = absorbing_covering(g, k, x_all, wc, r, alpha / 4.0, params, derive_seed(seed, 1));
    result.retries += p1.attempts - 1;
    note(*stage, "path of " + std::to_string(p1.gadget.path.size()) + " vertices");
    const VertexSet on_p1 = p1.gadget.path.vertex_set(n);
    const VertexSet v0p = v0 | (w_all - on_p1);

    stage = &stages[5];
    const auto p2 = absorbing_covering(g, k, v0p, xc, r, alpha / 4.0, params, derive_seed(seed, 2));
    result.retries += p2.attempts - 1;
    note(*stage, "path of " + std::to_string(p2.gadget.path.size()) + " vertices");
    const VertexSet on_p2 = p2.gadget.path.vertex_set(n);

    stage = &stages[6];
    const auto &q1 = p1.gadget.path.vertices();
    const auto &q2 = p2.gadget.path.vertices();
    const VertexSet used = on_p1 | on_p2;
    auto make_sets = [&](const std::vector<VertexSet> &from, std::size_t zf, const VertexSet &minus_f,
                         const std::vector<VertexSet> &to, std::size_t zt, const VertexSet &minus_t) {
      SetTuple sets = side_sets(from, zf, false, k, minus_f);
      sets.push_back(from[half - 1] - minus_f);
      sets.push_back(to[0] - minus_t);
      return concat(sets, rev(side_sets(to, zt, true, k, minus_t)));
    };
    std::vector<ConnectJob> jobs{
        {last_clique(q1, width), prefix(q2, width), make_sets(wc, p1.z, on_p1, xc, p2.z, on_p2)},
        {last_clique(q2, width), prefix(q1, width), make_sets(xc, p2.z, on_p2, wc, p1.z, on_p1)}};
    const auto links = connect_cliques(g, k, jobs, used, params, derive_seed(seed, 3));
    note(*stage, "links of " + std::to_string(links[0].size()) + " and " +
                     std::to_string(links[1].size()) + " vertices");

    auto merge = [&](const VertexTuple &a, const VertexTuple &b) {
      VertexTuple seq = a;
      const auto &l1 = links[0].vertices();
      seq.insert(seq.end(), l1.begin() + static_cast<std::ptrdiff_t>(width), l1.end());
      seq.insert(seq.end(), b.begin() + static_cast<std::ptrdiff_t>(width), b.end());
      const auto &l2 = links[1].vertices();
      seq.insert(seq.end(), l2.begin() + static_cast<std::ptrdiff_t>(width),
                 l2.end() - static_cast<std::ptrdiff_t>(width));
      return seq;
    };
    const VertexTuple cycle = merge(q1, q2);
    const VertexSet on_cycle = to_set(n, cycle);

    stage = &stages[7];
    const VertexSet rest1 = x_all - on_cycle;
    const VertexSet rest2 = v0p - on_cycle;
    const auto a1 = absorb(g, p1.gadget, rest1);
    const auto a2 = absorb(g, p2.gadget, rest2);
    note(*stage, std::to_string(rest1.size()) + " + " + std::to_string(rest2.size()) + " vertices absorbed");

    stage = &stages[8];
    result.order = merge(a1.vertices(), a2.vertices());
    if (result.order.size() != n || !is_power_hamilton_cycle(g, result.order, 2 * k + 1))
      throw Error(ErrorKind::invalid_path, "assembled order is not a power of a Hamilton cycle");
    note(*stage, "ok");
    result.success = true;
  } catch (const Error &e) {
    result.success = false;
    result.order.clear();
    result.failed_stage = stage ? *stage : "";
    result.failure = e.what();
    note(result.failed_stage, result.failure);
  }
  return result;
}

} // namespace powerlab
