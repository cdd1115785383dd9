#pragma once

#include "powerlab/graph.hpp"
#include "powerlab/tuple.hpp"

#include <string>
#include <utility>

namespace powerlab {

/// Ordered sequence of distinct vertices read as the r-th power of a path:
/// every two entries at index distance <= r are meant to be adjacent.
///
/// The path keeps no reference to a graph. Distinctness is enforced on
/// construction; adjacency is asserted against a graph with is_power_path or
/// the `validated` factory.
class PowerPath {
public:
  PowerPath() = default;
  PowerPath(VertexTuple vertices, int r);

  /// Throws invalid_path unless is_power_path(g, vertices, r).
  static PowerPath validated(const LayeredGraph &g, VertexTuple vertices, int r);

  const VertexTuple &vertices() const { return vertices_; }
  int r() const { return r_; }
  std::size_t size() const { return vertices_.size(); }
  VertexSet vertex_set(std::size_t universe) const {
    return to_set(universe, vertices_);
  }

  friend bool operator==(const PowerPath &, const PowerPath &) = default;

private:
  VertexTuple vertices_;
  int r_ = 1;
};

/// Distinct entries, and every pair at index distance <= r is an edge of the
/// combined layer.
bool is_power_path(const LayeredGraph &g, std::span<const Vertex> seq, int r);

/// Start and end cliques: the first and last r + 1 vertices. Throws too_short
/// when the path has fewer than r + 1 vertices.
std::pair<VertexTuple, VertexTuple> endpoints(const PowerPath &p);

/// P followed by Q, glued along t(P) = s(Q). Throws endpoint_mismatch when the
/// end of P is not the start of Q, overlap_violation when they share any
/// other vertex.
PowerPath concat(const PowerPath &p, const PowerPath &q);

/// Consecutive pairs (v_i, v_{i+1}); the r-th power of this path is the
/// required pair set of p.
std::vector<Edge> skeleton(const PowerPath &p);

/// All pairs at index distance <= r.
std::vector<Edge> required_pairs(const PowerPath &p);

/// v_{2i-1}, v_{2i} in V_i for every i. Throws length_mismatch unless
/// |p| = 2|V|.
bool is_bicanonical(const PowerPath &p, const SetTuple &sets);

/// Every pair at cyclic distance <= r is an edge of the combined layer.
/// Throws not_permutation unless `order` lists each vertex exactly once.
bool is_power_hamilton_cycle(const LayeredGraph &g, std::span<const Vertex> order, int r);

PowerPath rev(const PowerPath &p);

/// `r=<r> v1 v2 ...`
std::string to_string(const PowerPath &p);
PowerPath parse_power_path(const std::string &text);

} // namespace powerlab
