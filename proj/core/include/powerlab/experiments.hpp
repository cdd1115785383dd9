#pragma once

#include "powerlab/generators.hpp"
#include "powerlab/pipeline.hpp"
#include "powerlab/search.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace powerlab {

enum class Method { exact_search, pipeline };

std::string to_string(Method m);
Method method_from_string(const std::string &text);

/// 64-bit FNV-1a over the vertices of an order, each as 4 little-endian bytes.
std::uint64_t order_digest(std::span<const Vertex> order);

/// One perturb-then-decide experiment.
///
/// Text form, fields in this order:
///     trial=3 seed=1234 C=4 verdict=found elapsed=0.0012 digest=9f0c...
/// `digest=-` when no order was found. Verdicts: found, not_found,
/// budget_exceeded, pipeline_failed_at:<stage>.
struct TrialRecord {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  double C = 0.0;
  std::string verdict;
  double elapsed = 0.0;
  std::optional<std::uint64_t> digest;

  bool found() const { return verdict == "found"; }
  bool unknown() const { return verdict == "budget_exceeded"; }
};

std::string format_record(const TrialRecord &r);
/// Throws ParseError(line_no, ...) for a malformed record.
TrialRecord parse_record(const std::string &line, std::size_t line_no);

void write_records(std::ostream &out, const std::vector<TrialRecord> &records);
/// Blank lines and `#` comments are skipped.
std::vector<TrialRecord> read_records(std::istream &in);
void save_records(const std::string &path, const std::vector<TrialRecord> &records);
std::vector<TrialRecord> load_records(const std::string &path);

struct FrequencyRow {
  double C = 0.0;
  std::size_t trials = 0;
  std::size_t found = 0;
  std::size_t not_found = 0; // includes pipeline failures
  std::size_t unknown = 0;   // budget_exceeded, never part of the frequency

  /// found / (found + not_found); NaN when every trial was unknown.
  double frequency() const;
  /// More than 20% unknown verdicts makes a row invalid.
  bool valid() const { return 5 * unknown <= trials; }
};

struct FrequencyTable {
  std::vector<FrequencyRow> rows;

  /// Header `C,trials,found,not_found,unknown,frequency,valid`.
  void write_csv(std::ostream &out) const;
};

/// Groups records by C, keeping the order of `grid`.
FrequencyTable tabulate(const std::vector<TrialRecord> &records, std::span<const double> grid);

/// Two-sided bound on the drop between two adjacent frequencies that is
/// still consistent with equal underlying rates (normal approximation of the
/// two-proportion test, z = 2.576 for 99%).
double two_proportion_bound(const FrequencyRow &a, const FrequencyRow &b, double z = 2.576);

struct McResult {
  FrequencyTable table;
  std::vector<TrialRecord> records; // ordered by (grid index, trial)
  std::vector<std::string> warnings;
};

/// For every C of the grid runs `trials` experiments: the gamma layer of the
/// model is perturbed at p = min(1, C/n) with seed derive_seed(seed, trial),
/// so the random layers of one trial are nested as C grows. exact_search
/// decides the (2k+1)-st power of a Hamilton cycle by find_power_ham_cycle;
/// pipeline runs full_pipeline on the model's classes. Trials run on
/// `threads` workers (0 = hardware concurrency).
McResult mc_threshold(const ModelConfig &model, int k, std::span<const double> grid,
                      std::size_t trials, std::uint64_t seed, Method method,
                      const SearchBudget &budget, const PipelineParams &params = {},
                      double alpha = 0.01, unsigned threads = 1);

struct TightnessSummary {
  TightnessConstruction construction = TightnessConstruction::xy;
  std::size_t n = 0;
  int k = 0;
  double C = 0.0;
  std::uint64_t seed = 0;
  std::vector<TightnessReport> reports;
  std::vector<std::string> counterexamples; // random layer of every FAIL, edge-list text
  std::size_t pass = 0;
  std::size_t fail = 0;
  std::size_t inapplicable = 0;

  double pass_rate() const;
};

/// Runs tightness_certificate on `trials` perturbations (p = min(1, C/n),
/// seeds derive_seed(seed, i)) of the construction: the X/Y host with the
/// given alpha, or the balanced complete (k+1)-partite graph.
TightnessSummary tightness_report(TightnessConstruction construction, std::size_t n, int k,
                                  double C, std::size_t trials, std::uint64_t seed,
                                  double alpha = 0.01, const SearchBudget &budget = {},
                                  unsigned threads = 1);

void write_tightness_summary(std::ostream &out, const TightnessSummary &s);

/// Everything needed to repeat a Monte Carlo run.
///
/// key=value file: k, C_grid (comma separated), trials, seed, method,
/// max_nodes, time_limit, alpha, threads, plus `model.<key>` for the
/// generator and `params.<key>` for the pipeline parameters.
struct RunConfig {
  ModelConfig model;
  int k = 1;
  std::vector<double> C_grid;
  std::size_t trials = 1;
  std::uint64_t seed = 1;
  Method method = Method::exact_search;
  SearchBudget budget;
  PipelineParams params;
  double alpha = 0.01;
  unsigned threads = 1;

  std::map<std::string, std::string> to_key_values() const;
};

void write_run_config(std::ostream &out, const RunConfig &cfg);
/// Throws ParseError carrying the line of the offending key.
RunConfig read_run_config(std::istream &in);
void save_run_config(const std::string &path, const RunConfig &cfg);
RunConfig load_run_config(const std::string &path);

} // namespace powerlab
