#pragma once

#include <boost/dynamic_bitset.hpp>
#include <boost/rational.hpp>

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <vector>

namespace powerlab {

using Vertex = std::uint32_t;
inline constexpr Vertex npos = std::numeric_limits<Vertex>::max();

/// Subset of the vertex universe [0, n).
///
/// Binary operations require both operands to share a universe; mixing
/// universes is a programming error and throws invalid_argument.
class VertexSet {
public:
  using Bits = boost::dynamic_bitset<std::uint64_t>;

  VertexSet() = default;
  explicit VertexSet(std::size_t universe) : bits_(universe) {}
  VertexSet(std::size_t universe, std::initializer_list<Vertex> members);
  VertexSet(std::size_t universe, std::span<const Vertex> members);

  static VertexSet full(std::size_t universe);
  /// Members lo, lo + 1, ..., hi - 1.
  static VertexSet interval(std::size_t universe, Vertex lo, Vertex hi);

  std::size_t universe() const { return bits_.size(); }
  std::size_t size() const { return bits_.count(); }
  bool empty() const { return bits_.none(); }
  bool contains(Vertex v) const { return v < bits_.size() && bits_.test(v); }

  void insert(Vertex v);
  void erase(Vertex v);
  void clear() { bits_.reset(); }

  Vertex first() const;
  Vertex next(Vertex after) const;

  bool is_subset_of(const VertexSet &other) const;
  bool intersects(const VertexSet &other) const;

  VertexSet &operator&=(const VertexSet &other);
  VertexSet &operator|=(const VertexSet &other);
  VertexSet &operator-=(const VertexSet &other);

  friend VertexSet operator&(VertexSet a, const VertexSet &b) { return a &= b; }
  friend VertexSet operator|(VertexSet a, const VertexSet &b) { return a |= b; }
  friend VertexSet operator-(VertexSet a, const VertexSet &b) { return a -= b; }
  friend bool operator==(const VertexSet &a, const VertexSet &b) {
    return a.bits_ == b.bits_;
  }

  std::vector<Vertex> to_vector() const;

  template <class F> void for_each(F &&f) const {
    for (auto i = bits_.find_first(); i != Bits::npos; i = bits_.find_next(i))
      f(static_cast<Vertex>(i));
  }

  const Bits &bits() const { return bits_; }

private:
  void check_universe(const VertexSet &other) const;

  Bits bits_;
};

enum class Layer { gamma, random, combined };

struct Edge {
  Vertex u = 0;
  Vertex v = 0;

  /// Canonical orientation u < v.
  static Edge of(Vertex a, Vertex b) { return a < b ? Edge{a, b} : Edge{b, a}; }
  friend bool operator==(const Edge &, const Edge &) = default;
  friend auto operator<=>(const Edge &, const Edge &) = default;
};

/// Vertex set [0, n) with a dense layer (gamma) and a random layer.
///
/// A pair offered to both layers is stored in gamma only, so the layers are
/// always edge-disjoint and the combined layer is their union. Immutable once
/// built; safe to share read-only across threads.
class LayeredGraph {
public:
  LayeredGraph() = default;
  explicit LayeredGraph(std::size_t n);
  LayeredGraph(std::size_t n, std::span<const Edge> gamma_edges,
               std::span<const Edge> random_edges = {});

  std::size_t order() const { return n_; }
  VertexSet vertices() const { return VertexSet::full(n_); }

  const VertexSet &neighbors(Vertex v, Layer layer) const;
  bool adjacent(Vertex u, Vertex v, Layer layer) const;
  std::size_t degree(Vertex v, Layer layer) const {
    return neighbors(v, layer).size();
  }

  std::vector<Edge> edges(Layer layer) const;
  std::size_t edge_count(Layer layer) const;

  /// Same gamma layer, random layer replaced (deduplicated against gamma).
  LayeredGraph with_random_layer(std::span<const Edge> random_edges) const;

private:
  void add(Vertex u, Vertex v, std::vector<VertexSet> &rows);

  std::size_t n_ = 0;
  std::vector<VertexSet> gamma_;
  std::vector<VertexSet> random_;
  std::vector<VertexSet> combined_;
};

using Density = boost::rational<std::int64_t>;

/// N(X, Y): vertices of Y adjacent to every member of X. N(∅, Y) = Y.
VertexSet common_neighborhood(const LayeredGraph &g, Layer layer,
                              const VertexSet &x, const VertexSet &y);

/// Same, with X given as an ordered tuple (duplicates are harmless).
VertexSet common_neighborhood(const LayeredGraph &g, Layer layer,
                              std::span<const Vertex> x, const VertexSet &y);

/// e(X, Y) for disjoint X, Y.
std::size_t edges_between(const LayeredGraph &g, Layer layer,
                          const VertexSet &x, const VertexSet &y);

/// d(X, Y) = e(X, Y) / (|X| |Y|). Throws disjointness_violation or empty_set.
Density density(const LayeredGraph &g, Layer layer, const VertexSet &x,
                const VertexSet &y);

/// |N(v) ∩ X|.
std::size_t degree_into(const LayeredGraph &g, Layer layer, Vertex v,
                        const VertexSet &x);

std::size_t min_degree(const LayeredGraph &g, Layer layer);

/// True when the listed vertices are distinct and pairwise adjacent.
bool is_clique(const LayeredGraph &g, Layer layer, std::span<const Vertex> vs);

} // namespace powerlab
