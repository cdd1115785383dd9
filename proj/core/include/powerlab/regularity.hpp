#pragma once

#include "powerlab/graph.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace powerlab {

enum class RegularityVerdict { regular, irregular, undecided };

std::string to_string(RegularityVerdict v);

struct RegularityReport {
  VertexSet v1;
  VertexSet v2;
  double eps = 0.0;
  Density d;
  RegularityVerdict verdict = RegularityVerdict::undecided;
  /// Present iff irregular; |d(U1, U2) - d(V1, V2)| > eps.
  std::optional<std::pair<VertexSet, VertexSet>> witness;
  double deviation = 0.0; // largest deviation seen
};

/// Smallest admissible subset size ceil(eps * size), at least 1.
std::size_t size_floor(double eps, std::size_t size);

/// Exhaustive epsilon-regularity check.
///
/// Every U1 of admissible size on the smaller side is enumerated. For fixed U1
/// and |U2| = m, the density d(U1, U2) is largest when U2 takes the m
/// vertices with the most neighbours in U1 and smallest for the m with the
/// fewest, so those two choices decide every m exactly. An irregular verdict
/// carries the subset pair of maximum deviation. Throws too_large when either
/// side exceeds `cap`.
RegularityReport is_eps_regular_exact(const LayeredGraph &g, Layer layer, const VertexSet &v1,
                                      const VertexSet &v2, double eps, std::size_t cap = 16);

/// Tests `samples` random U1 at the size floor, each against its extremal U2
/// at the size floor. Reports irregular with a witness or undecided; never
/// regular. Throws invalid_argument for samples = 0.
RegularityReport is_eps_regular_sampled(const LayeredGraph &g, Layer layer,
                                        const VertexSet &v1, const VertexSet &v2, double eps,
                                        std::size_t samples, std::uint64_t seed);

/// Subsets of relative size >= delta of an eps-regular pair with density d
/// form an (eps/delta)-regular pair of density >= d - eps. Requires
/// 0 < eps <= delta <= 1/2 (range_violation otherwise).
std::pair<double, double> slice_regularity(double eps, double delta, double d);

struct Partition {
  VertexSet exceptional;
  std::vector<VertexSet> classes;

  std::size_t universe() const { return exceptional.universe(); }
  /// Throws disjointness_violation for overlaps and invalid_argument when
  /// the parts do not cover [n].
  void validate() const;
};

/// Classes as given, empty exceptional set.
Partition partition_from_classes(std::size_t n, std::vector<VertexSet> classes);

/// Lines `class <i>: v v ...` (i from 1) and `exceptional: v v ...`.
void write_partition(std::ostream &out, const Partition &p);
Partition read_partition(std::istream &in, std::size_t n);
Partition load_partition(const std::string &path, std::size_t n);
void save_partition(const std::string &path, const Partition &p);

struct RegularityOptions {
  std::size_t exact_cap = 16;
  std::size_t samples = 2000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct ReducedGraph {
  LayeredGraph graph; // on [t], edges in the gamma layer
  std::vector<std::vector<Density>> densities;
  std::vector<RegularityReport> pairs; // i < j in lexicographic order
  std::vector<std::pair<std::size_t, std::size_t>> undecided;
};

/// {i, j} is an edge iff (V_i, V_j) is verified eps-regular with density at
/// least d. Pairs above the exact cap are sampled; their undecided verdicts
/// are listed separately and never become edges.
ReducedGraph reduced_graph(const LayeredGraph &g, Layer layer, const Partition &p, double eps,
                           double d, const RegularityOptions &options = {});

struct DegreeFormReport {
  bool exceptional_small = false;          // (i) |V_0| <= eps n
  bool equal_sizes = false;                // (ii)
  std::optional<bool> degrees_kept;        // (iii), needs a reference graph
  bool classes_empty = false;              // (iv)
  bool pairs_regular = false;              // (v)
  std::vector<std::string> violations;

  bool ok() const {
    return exceptional_small && equal_sizes && degrees_kept.value_or(true) &&
           classes_empty && pairs_regular;
  }
};

/// Checks a partition against the degree form of the regularity lemma.
/// (iii) compares degrees with `reference`: deg(v) >= deg_ref(v) - (d+eps)n.
DegreeFormReport check_degree_form(const LayeredGraph &g, Layer layer, const Partition &p,
                                   double eps, double d,
                                   const LayeredGraph *reference = nullptr,
                                   const RegularityOptions &options = {});

/// delta(R) >= (k/(k+1) + alpha/4) t for the reduced graph of p.
bool reduced_min_degree_inherits(const LayeredGraph &g, Layer layer, const Partition &p,
                                 double eps, double d, int k, double alpha,
                                 const RegularityOptions &options = {});

/// Number of maps phi with phi(v) in sigma[v] that send every edge of H
/// (its gamma layer) to an edge of g's chosen layer. The sets must be
/// pairwise disjoint; throws too_large for more than 8 vertices in H.
std::uint64_t count_embeddings(const LayeredGraph &h, const LayeredGraph &g, Layer layer,
                               const std::vector<VertexSet> &sigma);

/// (prod |W|) (prod_{vw in E(H)} d(sigma(v), sigma(w)) -+ gamma).
std::pair<double, double> counting_lemma_band(const LayeredGraph &h, const LayeredGraph &g,
                                              Layer layer,
                                              const std::vector<VertexSet> &sigma,
                                              double gamma);

} // namespace powerlab
