#pragma once

#include "powerlab/graph.hpp"
#include "powerlab/power_path.hpp"

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace powerlab {

struct SearchBudget {
  std::uint64_t max_nodes = 200'000'000;
  double time_limit = 120.0; // seconds
};

enum class Verdict { found, not_found, budget_exceeded };

std::string to_string(Verdict v);

/// Node and wall-clock accounting shared by the backtracking searches.
class BudgetMeter {
public:
  explicit BudgetMeter(const SearchBudget &budget);

  /// Counts one node; false once either limit is hit (and stays false).
  bool tick();
  bool exceeded() const { return exceeded_; }
  std::uint64_t nodes() const { return nodes_; }

private:
  SearchBudget budget_;
  std::chrono::steady_clock::time_point start_;
  std::uint64_t nodes_ = 0;
  bool exceeded_ = false;
};

struct CycleSearchResult {
  Verdict verdict = Verdict::not_found;
  VertexTuple order; // set when found
  std::uint64_t nodes = 0;
};

/// Exact search for the r-th power of a Hamilton cycle in the combined layer.
///
/// Vertex 0 is fixed first and orientation is fixed by v_1 < v_{n-1}.
/// Candidates are tried in increasing id order and must be adjacent to the
/// last min(r, len) placed vertices (and to the wrap-around partners near the
/// start). A branch is cut when some unplaced vertex can no longer collect
/// min(2r, n-1) neighbours. not_found is returned only after the whole tree
/// was explored. Supports n <= 64.
CycleSearchResult find_power_ham_cycle(const LayeredGraph &g, int r,
                                       const SearchBudget &budget = {});

struct PathSearchResult {
  Verdict verdict = Verdict::not_found;
  std::optional<PowerPath> path;
  std::uint64_t nodes = 0;
};

/// Searches for an r-th power path whose first r + 1 vertices are s and last
/// r + 1 vertices are t, using only vertices of `allowed`. Lengths are tried
/// in increasing order, so a found path is a shortest one. With `spanning`
/// the path must use every vertex of `allowed`. Throws invalid_endpoint when
/// s or t is not an (r + 1)-clique. |allowed| <= 64.
PathSearchResult find_power_path_between(const LayeredGraph &g, const VertexTuple &s,
                                         const VertexTuple &t, int r,
                                         const VertexSet &allowed,
                                         const SearchBudget &budget = {},
                                         bool spanning = false);

/// Brute force over all (n-1)!/2 cyclic orders. Throws too_large for n > 10.
bool oracle_contains_power_ham_cycle(const LayeredGraph &g, int r);

struct PackingResult {
  std::vector<VertexTuple> cliques;
  VertexSet uncovered;
  std::uint64_t nodes = 0;
};

/// Maximum number of vertex-disjoint q-cliques in the chosen layer, by
/// branch and bound on the lowest remaining vertex with memoised subproblems.
/// Throws budget_exceeded when the budget runs out. Supports n <= 64.
PackingResult max_clique_packing(const LayeredGraph &g, int q,
                                 const SearchBudget &budget = {},
                                 Layer layer = Layer::combined);

/// Exact number of q-cliques inside one layer.
std::uint64_t count_cliques_in_layer(const LayeredGraph &g, Layer layer, int q);

enum class TightnessConstruction { xy, multipartite };
enum class CertificateVerdict { pass, fail, inapplicable };

std::string to_string(TightnessConstruction c);
TightnessConstruction tightness_construction_from_string(const std::string &text);
std::string to_string(CertificateVerdict v);

struct TightnessReport {
  TightnessConstruction construction = TightnessConstruction::xy;
  CertificateVerdict verdict = CertificateVerdict::fail;
  std::size_t n = 0;
  int k = 0;
  std::uint64_t random_triangles = 0;
  std::uint64_t random_k4 = 0;

  // xy
  std::size_t x_size = 0;
  int clique_size = 0;          // 2k + 3
  std::size_t max_packing = 0;
  std::size_t packing_needed = 0; // floor(n / (2k + 3))
  std::size_t uncovered_x = 0;

  // multipartite
  std::vector<std::size_t> isolated_per_class;
  std::size_t isolated = 0;      // |I|, largest class-wise count
  std::size_t remainder = 0;     // n mod (2k + 2)

  std::string note;
};

/// Obstruction certificate for the two tightness constructions.
///
/// xy: the graph must be the X/Y host (X independent, Y complete, X-Y
/// complete). Applicable when the random layer has no K_4 and fewer than |X|
/// triangles; PASS when the exact maximum K_{2k+3} packing is smaller than
/// floor(n / (2k+3)), so the (2k+2)-nd power of a Hamilton cycle is absent.
///
/// multipartite: the gamma layer must be complete (k+1)-partite. I is the
/// largest set of random-isolated vertices within one class. Each vertex of
/// I covered by a K_{2k+2} needs its own random triangle, and a (2k+1)-st
/// power of a Hamilton cycle leaves at most n mod (2k+2) vertices outside a
/// K_{2k+2} packing. Applicable and PASS when triangles < |I| - (n mod (2k+2)).
///
/// Throws wrong_construction when the gamma layer has the wrong shape.
TightnessReport tightness_certificate(TightnessConstruction construction,
                                      const LayeredGraph &g, int k,
                                      const SearchBudget &budget = {});

} // namespace powerlab
