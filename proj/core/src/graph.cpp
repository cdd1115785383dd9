#include "powerlab/graph.hpp"

#include "powerlab/error.hpp"

#include <string>

namespace powerlab {

VertexSet::VertexSet(std::size_t universe, std::initializer_list<Vertex> members)
    : bits_(universe) {
  for (auto v : members)
    insert(v);
}

VertexSet::VertexSet(std::size_t universe, std::span<const Vertex> members)
    : bits_(universe) {
  for (auto v : members)
    insert(v);
}

VertexSet VertexSet::full(std::size_t universe) {
  VertexSet s(universe);
  s.bits_.set();
  return s;
}

VertexSet VertexSet::interval(std::size_t universe, Vertex lo, Vertex hi) {
  VertexSet s(universe);
  for (Vertex v = lo; v < hi; ++v)
    s.insert(v);
  return s;
}

void VertexSet::insert(Vertex v) {
  if (v >= bits_.size())
    throw Error(ErrorKind::invalid_argument,
                "vertex " + std::to_string(v) + " outside universe of size " +
                    std::to_string(bits_.size()));
  bits_.set(v);
}

void VertexSet::erase(Vertex v) {
  if (v < bits_.size())
    bits_.reset(v);
}

Vertex VertexSet::first() const {
  auto i = bits_.find_first();
  return i == Bits::npos ? npos : static_cast<Vertex>(i);
}

Vertex VertexSet::next(Vertex after) const {
  auto i = bits_.find_next(after);
  return i == Bits::npos ? npos : static_cast<Vertex>(i);
}

void VertexSet::check_universe(const VertexSet &other) const {
  if (other.bits_.size() != bits_.size())
    throw Error(ErrorKind::invalid_argument, "vertex sets over different universes");
}

bool VertexSet::is_subset_of(const VertexSet &other) const {
  check_universe(other);
  return bits_.is_subset_of(other.bits_);
}

bool VertexSet::intersects(const VertexSet &other) const {
  check_universe(other);
  return bits_.intersects(other.bits_);
}

VertexSet &VertexSet::operator&=(const VertexSet &other) {
  check_universe(other);
  bits_ &= other.bits_;
  return *this;
}

VertexSet &VertexSet::operator|=(const VertexSet &other) {
  check_universe(other);
  bits_ |= other.bits_;
  return *this;
}

VertexSet &VertexSet::operator-=(const VertexSet &other) {
  check_universe(other);
  bits_ -= other.bits_;
  return *this;
}

std::vector<Vertex> VertexSet::to_vector() const {
  std::vector<Vertex> out;
  out.reserve(size());
  for_each([&](Vertex v) { out.push_back(v); });
  return out;
}

LayeredGraph::LayeredGraph(std::size_t n)
    : n_(n), gamma_(n, VertexSet(n)), random_(n, VertexSet(n)),
      combined_(n, VertexSet(n)) {}

LayeredGraph::LayeredGraph(std::size_t n, std::span<const Edge> gamma_edges,
                           std::span<const Edge> random_edges)
    : LayeredGraph(n) {
  for (const auto &e : gamma_edges)
    add(e.u, e.v, gamma_);
  for (const auto &e : random_edges) {
    if (e.u < n && e.v < n && gamma_[e.u].contains(e.v))
      continue;
    add(e.u, e.v, random_);
  }
}

void LayeredGraph::add(Vertex u, Vertex v, std::vector<VertexSet> &rows) {
  if (u >= n_ || v >= n_)
    throw Error(ErrorKind::invalid_argument,
                "edge {" + std::to_string(u) + "," + std::to_string(v) +
                    "} outside [0," + std::to_string(n_) + ")");
  if (u == v)
    throw Error(ErrorKind::invalid_argument, "self-loop at " + std::to_string(u));
  rows[u].insert(v);
  rows[v].insert(u);
  combined_[u].insert(v);
  combined_[v].insert(u);
}

const VertexSet &LayeredGraph::neighbors(Vertex v, Layer layer) const {
  if (v >= n_)
    throw Error(ErrorKind::invalid_argument, "vertex " + std::to_string(v) + " out of range");
  switch (layer) {
  case Layer::gamma: return gamma_[v];
  case Layer::random: return random_[v];
  case Layer::combined: break;
  }
  return combined_[v];
}

bool LayeredGraph::adjacent(Vertex u, Vertex v, Layer layer) const {
  return u < n_ && neighbors(u, layer).contains(v);
}

std::vector<Edge> LayeredGraph::edges(Layer layer) const {
  std::vector<Edge> out;
  for (Vertex u = 0; u < n_; ++u) {
    const auto &row = neighbors(u, layer);
    for (auto v = row.next(u); v != npos; v = row.next(v))
      out.push_back(Edge{u, v});
  }
  return out;
}

std::size_t LayeredGraph::edge_count(Layer layer) const {
  std::size_t twice = 0;
  for (Vertex u = 0; u < n_; ++u)
    twice += neighbors(u, layer).size();
  return twice / 2;
}

LayeredGraph LayeredGraph::with_random_layer(std::span<const Edge> random_edges) const {
  LayeredGraph out(n_);
  out.gamma_ = gamma_;
  out.combined_ = gamma_;
  for (const auto &e : random_edges) {
    if (e.u < n_ && e.v < n_ && gamma_[e.u].contains(e.v))
      continue;
    out.add(e.u, e.v, out.random_);
  }
  return out;
}

VertexSet common_neighborhood(const LayeredGraph &g, Layer layer,
                              const VertexSet &x, const VertexSet &y) {
  VertexSet out = y;
  x.for_each([&](Vertex v) { out &= g.neighbors(v, layer); });
  return out;
}

VertexSet common_neighborhood(const LayeredGraph &g, Layer layer,
                              std::span<const Vertex> x, const VertexSet &y) {
  VertexSet out = y;
  for (auto v : x)
    out &= g.neighbors(v, layer);
  return out;
}

std::size_t edges_between(const LayeredGraph &g, Layer layer,
                          const VertexSet &x, const VertexSet &y) {
  std::size_t e = 0;
  x.for_each([&](Vertex v) { e += (g.neighbors(v, layer) & y).size(); });
  return e;
}

Density density(const LayeredGraph &g, Layer layer, const VertexSet &x,
                const VertexSet &y) {
  if (x.empty() || y.empty())
    throw Error(ErrorKind::empty_set, "density needs nonempty X and Y");
  if (x.intersects(y))
    throw Error(ErrorKind::disjointness_violation, "density needs disjoint X and Y");
  auto e = static_cast<std::int64_t>(edges_between(g, layer, x, y));
  return Density(e, static_cast<std::int64_t>(x.size() * y.size()));
}

std::size_t degree_into(const LayeredGraph &g, Layer layer, Vertex v,
                        const VertexSet &x) {
  return (g.neighbors(v, layer) & x).size();
}

std::size_t min_degree(const LayeredGraph &g, Layer layer) {
  if (g.order() == 0)
    return 0;
  std::size_t best = g.order();
  for (Vertex v = 0; v < g.order(); ++v)
    best = std::min(best, g.degree(v, layer));
  return best;
}

bool is_clique(const LayeredGraph &g, Layer layer, std::span<const Vertex> vs) {
  for (std::size_t i = 0; i < vs.size(); ++i)
    for (std::size_t j = i + 1; j < vs.size(); ++j)
      if (!g.adjacent(vs[i], vs[j], layer))
        return false;
  return true;
}

} // namespace powerlab
