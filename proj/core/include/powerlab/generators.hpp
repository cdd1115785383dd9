#pragma once

#include "powerlab/graph.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace powerlab {

/// A generated host together with the vertex classes it was built from
/// (colour classes, the X/Y split, or blow-up clusters).
struct Construction {
  LayeredGraph graph;
  std::vector<VertexSet> parts;
};

/// Each of the C(n,2) pairs, in lexicographic order, is kept independently
/// with probability p (one draw per pair).
std::vector<Edge> gen_gnp(std::size_t n, double p, std::uint64_t seed);

/// Complete multipartite graph in the gamma layer; parts are the classes in
/// order, occupying consecutive vertex ids.
Construction gen_complete_multipartite(std::span<const std::size_t> class_sizes);

/// Class sizes for `parts` classes over n vertices, as equal as possible,
/// larger classes first.
std::vector<std::size_t> balanced_sizes(std::size_t n, std::size_t parts);

/// Tightness host for the square-of-cycle case: X independent with
/// |X| = round((1/3 - alpha) n), Y = the rest complete, X-Y complete bipartite.
/// parts = {X, Y}; X occupies ids [0, |X|).
Construction gen_xy_construction(std::size_t n, double alpha);

/// EXPERIMENTAL: the same shape with |X| = round((1/(k+1) - alpha) n). Only
/// k = 2 corresponds to a known tightness argument; other k carry no claim.
Construction gen_xy_construction_experimental(std::size_t n, double alpha,
                                              int k);

/// Gamma-only graph with minimum degree >= delta_min. Each attempt draws
/// G(n, delta_min/(n-1)) and runs one repair pass adding a random edge at every
/// deficient vertex; throws exhausted after max_attempts failed attempts.
LayeredGraph gen_dirac_random(std::size_t n, std::size_t delta_min,
                              std::uint64_t seed, std::size_t max_attempts);

/// Adds a G(n, p) random layer; pairs already in gamma are dropped.
LayeredGraph perturb(const LayeredGraph &gamma_graph, double p,
                     std::uint64_t seed);

/// Blow-up of `base` (its gamma layer): vertex i becomes an independent class
/// of class_size vertices, and base edges become complete bipartite graphs.
Construction gen_blowup(const LayeredGraph &base, std::size_t class_size);

enum class ModelKind {
  gnp,
  complete_multipartite,
  xy_construction,
  dirac_random,
  perturbed
};

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string &text);

/// Generator description; persisted as a key=value file.
///
/// Random-layer density is either an absolute probability (key `p`) or a
/// linear-density constant (key `C`, p = C/n, capped at 1). For gnp the value
/// is the edge probability of the single layer.
struct ModelConfig {
  ModelKind kind = ModelKind::gnp;
  std::size_t n = 0;
  int k = 1;
  double alpha = 0.01;
  double p_or_C = 0.0;
  bool is_constant = false;
  std::uint64_t seed = 1;
  std::vector<std::size_t> class_sizes;
  bool experimental = false;

  /// Probability actually used for the random layer.
  double probability() const;

  std::map<std::string, std::string> to_key_values() const;
  static ModelConfig from_key_values(const std::map<std::string, std::string> &kv);
};

/// Builds the host described by cfg: gamma graph from the kind's generator,
/// then (for every kind but gnp) a random layer at cfg.probability().
Construction build_model(const ModelConfig &cfg);

} // namespace powerlab
