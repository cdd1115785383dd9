#pragma once

#include "powerlab/error.hpp"
#include "powerlab/graph.hpp"
#include "powerlab/power_path.hpp"
#include "powerlab/regularity.hpp"
#include "powerlab/search.hpp"
#include "powerlab/tuple.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace powerlab {

/// Runtime knobs standing in for the constant hierarchy of the proofs.
struct PipelineParams {
  double rho = 0.2;
  double gamma = 0.15;
  double lambda = 0.2;
  double xi = 0.25;
  double eps = 0.2;
  double d = 0.3;
  double tol = 0.1; // leftover band half-width, relative
  int retry_limit = 5;
  SearchBudget budget{2'000'000, 20.0}; // per search attempt

  std::map<std::string, std::string> to_key_values() const;
  /// Unknown keys are ignored so a run config can carry other fields.
  static PipelineParams from_key_values(const std::map<std::string, std::string> &kv);
  void validate() const;
};

struct ExtendibilityCheck {
  VertexTuple tuple;
  SetTuple sets;
  double rho = 0.0;
  std::vector<double> margins; // |N(v^{>=2i}, V_i)| / |V_i|, 0 for empty V_i
  bool extendible = false;
};

/// Margins of v (length 2m) against V (length m). An empty V_i has margin 0
/// and makes the tuple non-extendible. Throws length_mismatch.
ExtendibilityCheck is_extendible(const LayeredGraph &g, Layer layer, const VertexTuple &v,
                                 const SetTuple &sets, double rho);

/// Skeleton pairs of the bicanonical construction (1-based a > b):
/// a - b = 1 with b odd, or a - b = 2k + 1 with b even. These are the k + 1
/// disjoint ordinary paths that the random layer is asked to supply.
bool is_skeleton_pair(std::size_t a, std::size_t b, int k);

struct LayerAudit {
  bool ok = false;
  std::size_t skeleton_random = 0; // skeleton pairs served by the random layer
  std::size_t skeleton_gamma = 0;
  std::size_t dense_pairs = 0;     // non-skeleton pairs, all in gamma when ok
};

/// Checks the layer split of a bicanonical path: every non-skeleton pair at
/// distance <= 2k+1 is a gamma edge and every skeleton pair is an edge.
LayerAudit audit_layers(const LayeredGraph &g, const PowerPath &p, int k);

/// Overrides for the endpoint conditions of build_bicanonical_path. When set,
/// rev(s) must be extendible into *s_sets and t into *t_sets (both minus the
/// new path). An empty tuple disables that check.
struct EndpointSets {
  std::optional<SetTuple> s_sets;
  std::optional<SetTuple> t_sets;
};

struct BicanonicalPath {
  PowerPath path;
  std::optional<ExtendibilityCheck> s_check;
  std::optional<ExtendibilityCheck> t_check;
  std::uint64_t nodes = 0;
  int attempts = 0;
};

/// Backtracking search for a V-bicanonical (2k+1)-path. Non-skeleton pairs
/// must be gamma edges and skeleton pairs edges of either layer. By default
/// rev(s) must be (S, rho)-extendible with S = (Ys, V_{k+1}, ..., V_2) \ V(P)
/// and t (T, rho)-extendible with T = (Yt, V_{l-k}, ..., V_{l-1}) \ V(P);
/// either check is skipped when its Y set is empty. Attempt 0 tries
/// candidates in id order, later attempts in a seeded random order, up to
/// params.retry_limit attempts. Throws not_found when an attempt exhausted
/// the tree, budget_exceeded when every attempt ran out of budget.
BicanonicalPath build_bicanonical_path(const LayeredGraph &g, int k, const SetTuple &sets,
                                       const VertexSet &ys, const VertexSet &yt, double rho,
                                       const PipelineParams &params, std::uint64_t seed,
                                       const EndpointSets &endpoints = {});

struct ConnectJob {
  VertexTuple s;
  VertexTuple t;
  SetTuple sets; // length 2k + 4
};

/// Thrown by connect_cliques; carries the index of the job that failed.
class ConnectError : public Error {
public:
  ConnectError(ErrorKind kind, std::size_t job, const std::string &what)
      : Error(kind, "job " + std::to_string(job) + ": " + what), job_(job) {}
  std::size_t job() const noexcept { return job_; }

private:
  std::size_t job_;
};

/// Connects each s_i to t_i by a path s_i ++ M_i ++ t_i, with M_i a
/// bicanonical path through
/// (N_s^1..N_s^{k+1}, V^{k+2}, V^{k+3}, N_t^{k+1}..N_t^1), where
/// N_s^j = N(s^{>=2j}, V^j) and N_t^j = N(rev(t)^{>=2j}, rev(V)^j). Jobs run in
/// order; each avoids `used`, all earlier paths and every job clique. A job
/// with s = t yields the trivial path. Throws ConnectError.
std::vector<PowerPath> connect_cliques(const LayeredGraph &g, int k,
                                       const std::vector<ConnectJob> &jobs,
                                       const VertexSet &used, const PipelineParams &params,
                                       std::uint64_t seed);

/// x may be inserted at index `after` of the path (between the vertices at
/// after - 1 and after).
struct Slot {
  Vertex x = 0;
  std::size_t after = 0;
  friend bool operator==(const Slot &, const Slot &) = default;
};

struct AbsorberGadget {
  PowerPath path;
  VertexSet absorbable;
  std::vector<Slot> slots;
};

/// `r=<r> v ...`, then `absorbable: x ...`, then one `slot <x> <after>` line
/// per absorbable vertex.
void write_gadget(std::ostream &out, const AbsorberGadget &gadget);
AbsorberGadget read_gadget(std::istream &in, std::size_t n);

/// Splices X* into the path at the recorded slots. Throws invalid_argument
/// when X* is not a subset of the absorbable set and not_absorbable when the
/// result is not a valid path with the same endpoints.
PowerPath absorb(const LayeredGraph &g, const AbsorberGadget &gadget, const VertexSet &x_star);

enum class VerifyMode { certificate, search };

/// For every X* of the absorbable set, checks that a path with the gadget's
/// endpoints on exactly V(P) + X* exists. Certificate mode checks the
/// splice at the recorded slots; search mode runs find_power_path_between
/// on that vertex set. Throws too_large when |X| > 12.
bool verify_absorbing(const LayeredGraph &g, const AbsorberGadget &gadget,
                      VerifyMode mode = VerifyMode::certificate,
                      const SearchBudget &budget = {});

struct LocalAbsorberOptions {
  /// Desired leftover |V_i \ (V(P) + Q)| per class; gamma |V_i| by default.
  std::optional<std::vector<double>> leftover_targets;
  /// Inclusive leftover bounds per class, replacing the (1 +- tol) band
  /// around the target.
  std::optional<std::vector<std::pair<std::size_t, std::size_t>>> leftover_bands;
};

struct LocalAbsorber {
  AbsorberGadget gadget;
  std::vector<std::size_t> leftover; // |V_i \ (V(P) + Q)|
  std::size_t y_used = 0;
  ExtendibilityCheck s_check; // rev(s) into (Y, V_{k+1}, ..., V_2) \ (V(P) + Q)
  ExtendibilityCheck t_check; // t into (Y, V_1, ..., V_k) \ (V(P) + Q)
  int attempts = 0;
};

/// X-absorbing path inside (V_1 + ... + V_{k+1} + Y) \ Q built by chaining
/// x-gadgets: each x gets a block (N(x), N(x)) with N(x) = (N(x, V_1'), ...,
/// N(x, V_{k+1}')) and is spliced after the block's first 2k+2 vertices.
/// Groups of L = floor(3(1 - gamma)/lambda) gadgets are chained through
/// (T_1..T_{k+1}, V_{k+1}') joints, then covering segments
/// (T.., V_{k+1}', V', V', ...) consume the classes until each leftover lies in
/// the band [(1 - tol) target, (1 + tol) target]. Throws infeasible_params when
/// the band or the Y budget cannot be met, precondition_failed when some x has
/// fewer than alpha |V_i| neighbours in V_i, not_found when the searches fail.
LocalAbsorber build_absorber_local(const LayeredGraph &g, int k, const VertexSet &x,
                                   const SetTuple &v, const VertexSet &y, const VertexSet &q,
                                   double alpha, const PipelineParams &params,
                                   std::uint64_t seed, const LocalAbsorberOptions &options = {});

struct AbsorbingCovering {
  AbsorberGadget gadget;
  std::size_t z = 0;                 // 0-based class index
  std::vector<std::size_t> leftover; // |W_i \ V(P)|
  ExtendibilityCheck s_check;        // rev(s) into (W_z, W_{k+1}, ..., W_2) \ V(P)
  ExtendibilityCheck t_check;        // t into (W_z, W_1, ..., W_k) \ V(P)
  std::vector<std::size_t> phi;      // block of each absorbable vertex, in id order
  std::vector<std::size_t> psi;      // Y-class of each block
  int attempts = 0;
};

/// X-absorbing path covering all but about gamma |W_i| of every class.
/// Classes are grouped into blocks K_j of k + 1 consecutive classes; each x
/// goes to a least-loaded block where it has eta |W|/t neighbours in every
/// class (eta = alpha/2), each block gets a Y-class psi(j) adjacent in R to
/// all of K_j, local absorbers are built block by block and joined with
/// connect_cliques, ending in a clique on (W_1, ..., W_{k+1}). Requires
/// (k+1) | t, the k-cycle (1..t) in R and delta(R) >= (k/(k+1) + alpha) t.
/// Throws no_common_neighbor_class, not_absorbable, precondition_failed and
/// the errors of the local construction.
AbsorbingCovering absorbing_covering(const LayeredGraph &g, int k, const VertexSet &x,
                                     const std::vector<VertexSet> &w,
                                     const LayeredGraph &reduced, double alpha,
                                     const PipelineParams &params, std::uint64_t seed);

struct PipelineResult {
  bool success = false;
  VertexTuple order;
  std::string failed_stage; // empty on success
  std::string failure;
  int retries = 0;
  std::vector<std::string> trace;
};

/// The full assembly: reduced graph, k-cycle, random split into X and W,
/// absorbing coverings of W and of the leftovers, two connections and the
/// final absorption. Throws precondition_failed when the partition fails the
/// degree form; every later failure is returned as a stage-tagged report.
/// A success is always checked with is_power_hamilton_cycle(2k + 1).
PipelineResult full_pipeline(const LayeredGraph &g, int k, const Partition &partition,
                             double alpha, const PipelineParams &params, std::uint64_t seed);

} // namespace powerlab
