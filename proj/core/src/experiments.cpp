#include "powerlab/experiments.hpp"

#include "powerlab/error.hpp"
#include "powerlab/io.hpp"
#include "powerlab/parallel.hpp"
#include "powerlab/regularity.hpp"
#include "powerlab/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace powerlab {

std::string to_string(Method m) {
  return m == Method::exact_search ? "exact_search" : "pipeline";
}

Method method_from_string(const std::string &text) {
  if (text == "exact_search" || text == "exact")
    return Method::exact_search;
  if (text == "pipeline")
    return Method::pipeline;
  throw Error(ErrorKind::invalid_argument, "unknown method '" + text + "'");
}

std::uint64_t order_digest(std::span<const Vertex> order) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (Vertex v : order) {
    auto x = static_cast<std::uint32_t>(v);
    for (int b = 0; b < 4; ++b) {
      h ^= (x >> (8 * b)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

std::string format_record(const TrialRecord &r) {
  std::ostringstream out;
  out << "trial=" << r.trial << " seed=" << r.seed << " C=" << format_double(r.C)
      << " verdict=" << r.verdict << " elapsed=" << format_double(r.elapsed) << " digest=";
  if (r.digest) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(*r.digest));
    out << buf;
  } else {
    out << '-';
  }
  return out.str();
}

namespace {

bool known_verdict(const std::string &v) {
  static const std::string failed = "pipeline_failed_at:";
  return v == "found" || v == "not_found" || v == "budget_exceeded" ||
         (v.size() > failed.size() && v.compare(0, failed.size(), failed) == 0);
}

} // namespace

TrialRecord parse_record(const std::string &line, std::size_t line_no) {
  static const char *const keys[] = {"trial", "seed", "C", "verdict", "elapsed", "digest"};
  std::istringstream in(line);
  std::string field;
  TrialRecord r;
  std::size_t index = 0;
  while (in >> field) {
    if (index >= 6)
      throw ParseError(line_no, "too many fields");
    const auto eq = field.find('=');
    if (eq == std::string::npos || field.substr(0, eq) != keys[index])
      throw ParseError(line_no, std::string("expected field '") + keys[index] + "'");
    const std::string value = field.substr(eq + 1);
    try {
      std::size_t used = 0;
      switch (index) {
      case 0:
        r.trial = std::stoull(value, &used);
        break;
      case 1:
        r.seed = std::stoull(value, &used);
        break;
      case 2:
        r.C = std::stod(value, &used);
        break;
      case 3:
        if (!known_verdict(value))
          throw ParseError(line_no, "unknown verdict '" + value + "'");
        r.verdict = value;
        used = value.size();
        break;
      case 4:
        r.elapsed = std::stod(value, &used);
        break;
      case 5:
        if (value == "-") {
          used = 1;
        } else {
          r.digest = std::stoull(value, &used, 16);
        }
        break;
      }
      if (used != value.size())
        throw ParseError(line_no, std::string("bad value for '") + keys[index] + "'");
    } catch (const std::logic_error &) {
      throw ParseError(line_no, std::string("bad value for '") + keys[index] + "'");
    }
    ++index;
  }
  if (index != 6)
    throw ParseError(line_no, "expected 6 fields, got " + std::to_string(index));
  return r;
}

void write_records(std::ostream &out, const std::vector<TrialRecord> &records) {
  for (const auto &r : records)
    out << format_record(r) << '\n';
}

std::vector<TrialRecord> read_records(std::istream &in) {
  std::vector<TrialRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body[0] == '#')
      continue;
    out.push_back(parse_record(body, line_no));
  }
  return out;
}

void save_records(const std::string &path, const std::vector<TrialRecord> &records) {
  std::ofstream out(path);
  if (!out)
    throw Error(ErrorKind::io_error, "cannot write " + path);
  write_records(out, records);
}

std::vector<TrialRecord> load_records(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorKind::io_error, "cannot open " + path);
  return read_records(in);
}

double FrequencyRow::frequency() const {
  const auto decided = found + not_found;
  return decided == 0 ? std::numeric_limits<double>::quiet_NaN()
                      : static_cast<double>(found) / static_cast<double>(decided);
}

void FrequencyTable::write_csv(std::ostream &out) const {
  out << "C,trials,found,not_found,unknown,frequency,valid\n";
  for (const auto &r : rows) {
    const double f = r.frequency();
    out << format_double(r.C) << ',' << r.trials << ',' << r.found << ',' << r.not_found << ','
        << r.unknown << ',' << (std::isnan(f) ? std::string("nan") : format_double(f)) << ','
        << (r.valid() ? 1 : 0) << '\n';
  }
}

FrequencyTable tabulate(const std::vector<TrialRecord> &records, std::span<const double> grid) {
  FrequencyTable table;
  for (double c : grid) {
    FrequencyRow row;
    row.C = c;
    for (const auto &r : records) {
      if (r.C != c)
        continue;
      ++row.trials;
      if (r.found())
        ++row.found;
      else if (r.unknown())
        ++row.unknown;
      else
        ++row.not_found;
    }
    table.rows.push_back(row);
  }
  return table;
}

double two_proportion_bound(const FrequencyRow &a, const FrequencyRow &b, double z) {
  const double na = static_cast<double>(a.found + a.not_found);
  const double nb = static_cast<double>(b.found + b.not_found);
  if (na == 0 || nb == 0)
    return 1.0;
  const double pooled = static_cast<double>(a.found + b.found) / (na + nb);
  return z * std::sqrt(pooled * (1.0 - pooled) * (1.0 / na + 1.0 / nb));
}

McResult mc_threshold(const ModelConfig &model, int k, std::span<const double> grid,
                      std::size_t trials, std::uint64_t seed, Method method,
                      const SearchBudget &budget, const PipelineParams &params, double alpha,
                      unsigned threads) {
  if (trials == 0)
    throw Error(ErrorKind::invalid_argument, "need at least one trial");
  if (k < 1)
    throw Error(ErrorKind::invalid_argument, "need k >= 1");
  McResult out;

  ModelConfig host_cfg = model;
  host_cfg.p_or_C = 0.0;
  const Construction host = build_model(host_cfg);
  const std::size_t n = host.graph.order();
  const double need = (static_cast<double>(k) / (k + 1) + alpha) * static_cast<double>(n);
  const std::size_t delta = min_degree(host.graph, Layer::gamma);
  if (static_cast<double>(delta) + 1e-9 < need)
    out.warnings.push_back("host minimum degree " + std::to_string(delta) + " is below (k/(k+1) + alpha) n = " +
                           format_double(need));

  std::optional<Partition> partition;
  if (method == Method::pipeline && !host.parts.empty())
    partition = partition_from_classes(n, host.parts);

  out.records.resize(grid.size() * trials);
  parallel_for(out.records.size(), threads, [&](std::size_t job) {
    const std::size_t ci = job / trials;
    const std::size_t trial = job % trials;
    const double c = grid[ci];
    const double p = n == 0 ? 0.0 : std::clamp(c / static_cast<double>(n), 0.0, 1.0);
    TrialRecord rec;
    rec.trial = trial;
    rec.seed = derive_seed(seed, trial);
    rec.C = c;
    const auto start = std::chrono::steady_clock::now();
    const LayeredGraph g = perturb(host.graph, p, rec.seed);
    if (method == Method::exact_search) {
      const auto res = find_power_ham_cycle(g, 2 * k + 1, budget);
      rec.verdict = to_string(res.verdict);
      if (res.verdict == Verdict::found)
        rec.digest = order_digest(res.order);
    } else if (!partition) {
      rec.verdict = "pipeline_failed_at:degree_form";
    } else {
      try {
        const auto res = full_pipeline(g, k, *partition, alpha, params, rec.seed);
        if (res.success) {
          rec.verdict = "found";
          rec.digest = order_digest(res.order);
        } else {
          rec.verdict = "pipeline_failed_at:" + res.failed_stage;
        }
      } catch (const Error &) {
        rec.verdict = "pipeline_failed_at:degree_form";
      }
    }
    rec.elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.records[job] = std::move(rec);
  });

  out.table = tabulate(out.records, grid);
  for (const auto &row : out.table.rows)
    if (!row.valid())
      out.warnings.push_back("row C=" + format_double(row.C) + " has more than 20% unknown verdicts");
  return out;
}

double TightnessSummary::pass_rate() const {
  return reports.empty() ? 0.0
                         : static_cast<double>(pass) / static_cast<double>(reports.size());
}

TightnessSummary tightness_report(TightnessConstruction construction, std::size_t n, int k,
                                  double C, std::size_t trials, std::uint64_t seed, double alpha,
                                  const SearchBudget &budget, unsigned threads) {
  if (trials == 0)
    throw Error(ErrorKind::invalid_argument, "need at least one trial");
  Construction host;
  if (construction == TightnessConstruction::xy)
    host = k == 2 ? gen_xy_construction(n, alpha) : gen_xy_construction_experimental(n, alpha, k);
  else
    host = gen_complete_multipartite(balanced_sizes(n, static_cast<std::size_t>(k + 1)));
  const double p = n == 0 ? 0.0 : std::clamp(C / static_cast<double>(n), 0.0, 1.0);

  TightnessSummary s;
  s.construction = construction;
  s.n = n;
  s.k = k;
  s.C = C;
  s.seed = seed;
  s.reports.resize(trials);
  std::vector<std::string> dumps(trials);
  parallel_for(trials, threads, [&](std::size_t i) {
    const LayeredGraph g = perturb(host.graph, p, derive_seed(seed, i));
    s.reports[i] = tightness_certificate(construction, g, k, budget);
    if (s.reports[i].verdict == CertificateVerdict::fail) {
      std::ostringstream text;
      text << "# trial " << i << " seed " << derive_seed(seed, i) << '\n';
      write_edge_list(text, LayeredGraph(n, {}, g.edges(Layer::random)));
      dumps[i] = text.str();
    }
  });
  for (std::size_t i = 0; i < trials; ++i) {
    switch (s.reports[i].verdict) {
    case CertificateVerdict::pass:
      ++s.pass;
      break;
    case CertificateVerdict::fail:
      ++s.fail;
      s.counterexamples.push_back(dumps[i]);
      break;
    case CertificateVerdict::inapplicable:
      ++s.inapplicable;
      break;
    }
  }
  return s;
}

void write_tightness_summary(std::ostream &out, const TightnessSummary &s) {
  out << "construction=" << to_string(s.construction) << " n=" << s.n << " k=" << s.k
      << " C=" << format_double(s.C) << " seed=" << s.seed << '\n';
  out << "trials=" << s.reports.size() << " pass=" << s.pass << " fail=" << s.fail
      << " inapplicable=" << s.inapplicable << " pass_rate=" << format_double(s.pass_rate())
      << '\n';
  for (std::size_t i = 0; i < s.reports.size(); ++i) {
    const auto &r = s.reports[i];
    out << "trial=" << i << " verdict=" << to_string(r.verdict)
        << " triangles=" << r.random_triangles << " k4=" << r.random_k4;
    if (s.construction == TightnessConstruction::xy)
      out << " max_packing=" << r.max_packing << " needed=" << r.packing_needed
          << " uncovered_x=" << r.uncovered_x;
    else
      out << " isolated=" << r.isolated << " remainder=" << r.remainder;
    if (!r.note.empty())
      out << " note=\"" << r.note << '"';
    out << '\n';
  }
  for (const auto &dump : s.counterexamples)
    out << dump;
}

std::map<std::string, std::string> RunConfig::to_key_values() const {
  std::map<std::string, std::string> kv;
  kv["k"] = std::to_string(k);
  std::string grid;
  for (double c : C_grid)
    grid += (grid.empty() ? "" : ",") + format_double(c);
  kv["C_grid"] = grid;
  kv["trials"] = std::to_string(trials);
  kv["seed"] = std::to_string(seed);
  kv["method"] = to_string(method);
  kv["max_nodes"] = std::to_string(budget.max_nodes);
  kv["time_limit"] = format_double(budget.time_limit);
  kv["alpha"] = format_double(alpha);
  kv["threads"] = std::to_string(threads);
  for (const auto &[key, value] : model.to_key_values())
    kv["model." + key] = value;
  for (const auto &[key, value] : params.to_key_values())
    kv["params." + key] = value;
  return kv;
}

void write_run_config(std::ostream &out, const RunConfig &cfg) {
  write_key_values(out, cfg.to_key_values());
}

RunConfig read_run_config(std::istream &in) {
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  std::istringstream first(text);
  const auto kv = read_key_values(first);

  std::map<std::string, std::size_t> line_of;
  {
    std::istringstream again(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(again, line)) {
      ++line_no;
      const auto eq = line.find('=');
      if (eq != std::string::npos)
        line_of.emplace(trim(line.substr(0, eq)), line_no);
    }
  }
  auto fail = [&](const std::string &key, const std::string &what) -> ParseError {
    return ParseError(line_of.count(key) ? line_of[key] : 0, what);
  };

  RunConfig cfg;
  std::map<std::string, std::string> model_kv, params_kv;
  for (const auto &[key, value] : kv) {
    try {
      std::size_t used = value.size();
      if (key.rfind("model.", 0) == 0) {
        model_kv[key.substr(6)] = value;
      } else if (key.rfind("params.", 0) == 0) {
        params_kv[key.substr(7)] = value;
      } else if (key == "k") {
        cfg.k = std::stoi(value, &used);
      } else if (key == "C_grid") {
        cfg.C_grid.clear();
        std::stringstream items(value);
        std::string item;
        while (std::getline(items, item, ',')) {
          std::size_t u = 0;
          const auto t = trim(item);
          cfg.C_grid.push_back(std::stod(t, &u));
          if (u != t.size())
            throw fail(key, "bad number in C_grid");
        }
      } else if (key == "trials") {
        cfg.trials = std::stoull(value, &used);
      } else if (key == "seed") {
        cfg.seed = std::stoull(value, &used);
      } else if (key == "method") {
        cfg.method = method_from_string(value);
      } else if (key == "max_nodes") {
        cfg.budget.max_nodes = std::stoull(value, &used);
      } else if (key == "time_limit") {
        cfg.budget.time_limit = std::stod(value, &used);
      } else if (key == "alpha") {
        cfg.alpha = std::stod(value, &used);
      } else if (key == "threads") {
        cfg.threads = static_cast<unsigned>(std::stoul(value, &used));
      } else {
        throw fail(key, "unknown key '" + key + "'");
      }
      if (used != value.size())
        throw fail(key, "bad value for '" + key + "'");
    } catch (const ParseError &) {
      throw;
    } catch (const Error &e) {
      throw fail(key, e.what());
    } catch (const std::logic_error &) {
      throw fail(key, "bad value for '" + key + "'");
    }
  }
  auto first_line = [&](const std::string &prefix) {
    std::size_t best = 0;
    for (const auto &[key, line] : line_of)
      if (key.rfind(prefix, 0) == 0 && (best == 0 || line < best))
        best = line;
    return best;
  };
  try {
    cfg.model = ModelConfig::from_key_values(model_kv);
  } catch (const Error &e) {
    throw ParseError(first_line("model."), e.what());
  }
  try {
    cfg.params = PipelineParams::from_key_values(params_kv);
  } catch (const Error &e) {
    throw ParseError(first_line("params."), e.what());
  }
  return cfg;
}

void save_run_config(const std::string &path, const RunConfig &cfg) {
  save_key_values(path, cfg.to_key_values());
}

RunConfig load_run_config(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorKind::io_error, "cannot open " + path);
  return read_run_config(in);
}

} // namespace powerlab
