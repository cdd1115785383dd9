#include "powerlab/error.hpp"
#include "powerlab/experiments.hpp"
#include "powerlab/generators.hpp"
#include "powerlab/io.hpp"
#include "powerlab/pipeline.hpp"
#include "powerlab/power_path.hpp"
#include "powerlab/regularity.hpp"
#include "powerlab/search.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace powerlab;

namespace {

// Writes to `path`, or to stdout for "" and "-".
template <class F> void emit(const std::string &path, F &&write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out)
    throw Error(ErrorKind::io_error, "cannot write " + path);
  write(out);
}

Layer layer_from_string(const std::string &s) {
  if (s == "gamma")
    return Layer::gamma;
  if (s == "random")
    return Layer::random;
  if (s == "combined")
    return Layer::combined;
  throw Error(ErrorKind::invalid_argument, "unknown layer " + s);
}

std::string join(const VertexTuple &v) {
  std::ostringstream out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out << (i ? " " : "") << v[i];
  return out.str();
}

VertexSet parse_set(std::size_t n, const std::vector<Vertex> &vs) {
  VertexSet s(n);
  for (Vertex v : vs) {
    if (v >= n)
      throw Error(ErrorKind::invalid_argument, "vertex " + std::to_string(v) + " outside [0, n)");
    s.insert(v);
  }
  return s;
}

struct BudgetFlags {
  std::uint64_t max_nodes = SearchBudget{}.max_nodes;
  double time_limit = SearchBudget{}.time_limit;

  void add(CLI::App *app) {
    app->add_option("--max-nodes", max_nodes, "node budget per search")->capture_default_str();
    app->add_option("--time-limit", time_limit, "seconds per search")->capture_default_str();
  }
  SearchBudget get() const { return {max_nodes, time_limit}; }
};

// ---- gen -------------------------------------------------------------------

struct GenArgs {
  std::string config, save_config, out, parts_out;
  std::string model = "gnp";
  std::size_t n = 0;
  int k = 1;
  double alpha = 0.01;
  std::optional<double> p, C;
  std::vector<std::size_t> sizes;
  std::uint64_t seed = 1;
  bool experimental = false;
};

void run_gen(const GenArgs &a) {
  ModelConfig cfg;
  if (!a.config.empty()) {
    cfg = ModelConfig::from_key_values(load_key_values(a.config));
  } else {
    cfg.kind = model_kind_from_string(a.model);
    cfg.n = a.n;
    cfg.k = a.k;
    cfg.alpha = a.alpha;
    cfg.seed = a.seed;
    cfg.class_sizes = a.sizes;
    cfg.experimental = a.experimental;
    if (a.C) {
      cfg.p_or_C = *a.C;
      cfg.is_constant = true;
    } else if (a.p) {
      cfg.p_or_C = *a.p;
    }
  }
  const auto c = build_model(cfg);
  if (!a.save_config.empty())
    save_key_values(a.save_config, cfg.to_key_values());
  emit(a.out, [&](std::ostream &o) { write_edge_list(o, c.graph); });
  if (!a.parts_out.empty() && !c.parts.empty())
    save_partition(a.parts_out, partition_from_classes(c.graph.order(), c.parts));
  std::cerr << "n=" << c.graph.order() << " gamma_edges=" << c.graph.edge_count(Layer::gamma)
            << " random_edges=" << c.graph.edge_count(Layer::random)
            << " min_degree=" << min_degree(c.graph, Layer::combined) << "\n";
}

// ---- search ----------------------------------------------------------------

struct SearchArgs {
  std::string input, out;
  int r = 2;
  std::optional<int> packing;
  bool oracle = false;
  BudgetFlags budget;
};

int run_search(const SearchArgs &a) {
  const auto g = load_edge_list(a.input);
  if (a.packing) {
    const auto res = max_clique_packing(g, *a.packing, a.budget.get());
    emit(a.out, [&](std::ostream &o) {
      o << "cliques=" << res.cliques.size() << " uncovered=" << res.uncovered.size()
        << " nodes=" << res.nodes << "\n";
      for (const auto &c : res.cliques)
        o << join(c) << "\n";
    });
    return 0;
  }
  const auto res = find_power_ham_cycle(g, a.r, a.budget.get());
  emit(a.out, [&](std::ostream &o) {
    o << "verdict=" << to_string(res.verdict) << " r=" << a.r << " nodes=" << res.nodes << "\n";
    if (res.verdict == Verdict::found)
      o << "order " << join(res.order) << "\n";
  });
  if (a.oracle) {
    const bool truth = oracle_contains_power_ham_cycle(g, a.r);
    std::cout << "oracle=" << (truth ? "found" : "not_found") << "\n";
    if (res.verdict != Verdict::budget_exceeded && truth != (res.verdict == Verdict::found)) {
      std::cerr << "search and oracle disagree\n";
      return 1;
    }
  }
  return 0;
}

// ---- pipeline --------------------------------------------------------------

struct PipelineArgs {
  std::string input, partition, params, out;
  int k = 1;
  double alpha = 0.01;
  std::uint64_t seed = 1;
  bool quiet = false;
};

int run_pipeline(const PipelineArgs &a) {
  const auto g = load_edge_list(a.input);
  const auto part = load_partition(a.partition, g.order());
  PipelineParams params;
  if (!a.params.empty())
    params = PipelineParams::from_key_values(load_key_values(a.params));
  params.validate();
  const auto res = full_pipeline(g, a.k, part, a.alpha, params, a.seed);
  if (!a.quiet)
    for (const auto &line : res.trace)
      std::cerr << line << "\n";
  emit(a.out, [&](std::ostream &o) {
    if (res.success)
      o << "success retries=" << res.retries << "\norder " << join(res.order) << "\n";
    else
      o << "failed_at=" << res.failed_stage << " retries=" << res.retries << "\n"
        << res.failure << "\n";
  });
  return res.success ? 0 : 1;
}

// ---- mc --------------------------------------------------------------------

struct McArgs {
  std::string config, records, csv;
  std::optional<unsigned> threads;
};

void run_mc(const McArgs &a) {
  auto cfg = load_run_config(a.config);
  if (a.threads)
    cfg.threads = *a.threads;
  const auto res = mc_threshold(cfg.model, cfg.k, cfg.C_grid, cfg.trials, cfg.seed, cfg.method,
                                cfg.budget, cfg.params, cfg.alpha, cfg.threads);
  for (const auto &w : res.warnings)
    std::cerr << "warning: " << w << "\n";
  if (!a.records.empty())
    save_records(a.records, res.records);
  emit(a.csv, [&](std::ostream &o) { res.table.write_csv(o); });
  for (std::size_t i = 1; i < res.table.rows.size(); ++i) {
    const auto &prev = res.table.rows[i - 1], &cur = res.table.rows[i];
    if (prev.frequency() - cur.frequency() > two_proportion_bound(prev, cur))
      std::cerr << "warning: frequency drops from C=" << format_double(prev.C)
                << " to C=" << format_double(cur.C) << " beyond the 99% bound\n";
  }
}

// ---- tightness -------------------------------------------------------------

struct TightnessArgs {
  std::string construction = "xy", out, dump;
  std::size_t n = 21;
  int k = 2;
  double C = 0.0;
  std::size_t trials = 10;
  std::uint64_t seed = 1;
  double alpha = 0.01;
  unsigned threads = 1;
  BudgetFlags budget;
};

void run_tightness(const TightnessArgs &a) {
  const auto s = tightness_report(tightness_construction_from_string(a.construction), a.n, a.k, a.C,
                                  a.trials, a.seed, a.alpha, a.budget.get(), a.threads);
  emit(a.out, [&](std::ostream &o) { write_tightness_summary(o, s); });
  if (!a.dump.empty())
    emit(a.dump, [&](std::ostream &o) {
      for (const auto &c : s.counterexamples)
        o << c << "\n";
    });
}

// ---- verify-absorber -------------------------------------------------------

struct VerifyArgs {
  std::string input, gadget, mode = "certificate";
  std::optional<std::vector<Vertex>> absorb_set;
  BudgetFlags budget;
};

int run_verify(const VerifyArgs &a) {
  const auto g = load_edge_list(a.input);
  std::ifstream in(a.gadget);
  if (!in)
    throw Error(ErrorKind::io_error, "cannot read " + a.gadget);
  const auto gadget = read_gadget(in, g.order());
  if (a.absorb_set) {
    const auto path = absorb(g, gadget, parse_set(g.order(), *a.absorb_set));
    std::cout << to_string(path) << "\n";
    return 0;
  }
  VerifyMode mode;
  if (a.mode == "certificate")
    mode = VerifyMode::certificate;
  else if (a.mode == "search")
    mode = VerifyMode::search;
  else
    throw Error(ErrorKind::invalid_argument, "unknown mode " + a.mode);
  const bool ok = verify_absorbing(g, gadget, mode, a.budget.get());
  std::cout << (ok ? "absorbing" : "not_absorbing") << " |X|=" << gadget.absorbable.size()
            << " |P|=" << gadget.path.size() << "\n";
  return ok ? 0 : 1;
}

// ---- regcheck --------------------------------------------------------------

struct RegArgs {
  std::string input, partition, layer = "combined";
  std::vector<Vertex> v1, v2;
  double eps = 0.2, d = 0.3;
  std::size_t cap = 16, samples = 2000;
  std::uint64_t seed = 0;
  bool degree_form = false;
};

void print_report(std::ostream &o, const RegularityReport &r) {
  o << "verdict=" << to_string(r.verdict) << " density=" << format_double(boost::rational_cast<double>(r.d))
    << " deviation=" << format_double(r.deviation) << "\n";
  if (r.witness)
    o << "witness U1: " << join(r.witness->first.to_vector()) << "\n"
      << "witness U2: " << join(r.witness->second.to_vector()) << "\n";
}

int run_regcheck(const RegArgs &a) {
  const auto g = load_edge_list(a.input);
  const Layer layer = layer_from_string(a.layer);
  if (a.partition.empty()) {
    const auto s1 = parse_set(g.order(), a.v1), s2 = parse_set(g.order(), a.v2);
    const bool small = s1.size() <= a.cap && s2.size() <= a.cap;
    const auto r = small ? is_eps_regular_exact(g, layer, s1, s2, a.eps, a.cap)
                         : is_eps_regular_sampled(g, layer, s1, s2, a.eps, a.samples, a.seed);
    print_report(std::cout, r);
    return r.verdict == RegularityVerdict::irregular ? 1 : 0;
  }
  const auto part = load_partition(a.partition, g.order());
  RegularityOptions opt;
  opt.exact_cap = a.cap;
  opt.samples = a.samples;
  opt.seed = a.seed;
  if (a.degree_form) {
    const auto rep = check_degree_form(g, layer, part, a.eps, a.d, nullptr, opt);
    for (const auto &v : rep.violations)
      std::cout << "violation: " << v << "\n";
    std::cout << (rep.ok() ? "degree_form=ok" : "degree_form=violated") << "\n";
    return rep.ok() ? 0 : 1;
  }
  const auto red = reduced_graph(g, layer, part, a.eps, a.d, opt);
  std::size_t idx = 0;
  for (std::size_t i = 0; i < part.classes.size(); ++i)
    for (std::size_t j = i + 1; j < part.classes.size(); ++j) {
      const auto &r = red.pairs[idx++];
      std::cout << "pair " << i + 1 << " " << j + 1 << " " << to_string(r.verdict)
                << " density=" << format_double(boost::rational_cast<double>(r.d))
                << (red.graph.adjacent(static_cast<Vertex>(i), static_cast<Vertex>(j), Layer::gamma)
                        ? " edge"
                        : "")
                << "\n";
    }
  std::cout << "reduced: t=" << part.classes.size() << " edges=" << red.graph.edge_count(Layer::gamma)
            << " undecided=" << red.undecided.size()
            << " min_degree=" << min_degree(red.graph, Layer::combined) << "\n";
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Experiments on powers of Hamilton cycles in randomly perturbed graphs"};
  app.require_subcommand(1);

  GenArgs gen;
  auto *g = app.add_subcommand("gen", "generate a host graph as a layered edge list");
  g->add_option("--config", gen.config, "model key=value file (overrides the flags)");
  g->add_option("--model", gen.model, "gnp | complete_multipartite | xy_construction | dirac_random | perturbed")
      ->capture_default_str();
  g->add_option("--n", gen.n, "number of vertices");
  g->add_option("--k", gen.k)->capture_default_str();
  g->add_option("--alpha", gen.alpha)->capture_default_str();
  auto *gp = g->add_option("--p", gen.p, "random-layer probability");
  g->add_option("--C", gen.C, "random-layer constant, p = C/n")->excludes(gp);
  g->add_option("--sizes", gen.sizes, "class sizes of a multipartite host")->delimiter(',');
  g->add_option("--seed", gen.seed)->capture_default_str();
  g->add_flag("--experimental", gen.experimental, "X/Y shape for k != 2");
  g->add_option("--out,-o", gen.out, "edge-list file (default stdout)");
  g->add_option("--parts", gen.parts_out, "write the construction's classes as a partition");
  g->add_option("--save-config", gen.save_config, "write the model as key=value");

  SearchArgs search;
  auto *s = app.add_subcommand("search", "exact search for an r-th power of a Hamilton cycle");
  s->add_option("--input,-i", search.input)->required()->check(CLI::ExistingFile);
  s->add_option("--r", search.r)->capture_default_str();
  s->add_option("--packing", search.packing, "maximum q-clique packing instead");
  s->add_flag("--oracle", search.oracle, "cross-check with brute force (n <= 10)");
  s->add_option("--out,-o", search.out);
  search.budget.add(s);

  PipelineArgs pipe;
  auto *p = app.add_subcommand("pipeline", "run the constructive absorbing pipeline");
  p->add_option("--input,-i", pipe.input)->required()->check(CLI::ExistingFile);
  p->add_option("--partition", pipe.partition, "regularity partition file")->required()->check(CLI::ExistingFile);
  p->add_option("--k", pipe.k)->capture_default_str();
  p->add_option("--alpha", pipe.alpha)->capture_default_str();
  p->add_option("--params", pipe.params, "pipeline parameters, key=value")->check(CLI::ExistingFile);
  p->add_option("--seed", pipe.seed)->capture_default_str();
  p->add_flag("--quiet,-q", pipe.quiet, "suppress the stage trace");
  p->add_option("--out,-o", pipe.out);

  McArgs mc;
  auto *m = app.add_subcommand("mc", "Monte Carlo frequency over a grid of C");
  m->add_option("--config,-c", mc.config, "run config, key=value")->required()->check(CLI::ExistingFile);
  m->add_option("--records", mc.records, "per-trial records file");
  m->add_option("--csv", mc.csv, "frequency table (default stdout)");
  m->add_option("--threads", mc.threads, "override the config's thread count");

  TightnessArgs tight;
  auto *t = app.add_subcommand("tightness", "tightness certificates over perturbed constructions");
  t->add_option("--construction", tight.construction, "xy | multipartite")->capture_default_str();
  t->add_option("--n", tight.n)->capture_default_str();
  t->add_option("--k", tight.k)->capture_default_str();
  t->add_option("--C", tight.C)->capture_default_str();
  t->add_option("--trials", tight.trials)->capture_default_str();
  t->add_option("--seed", tight.seed)->capture_default_str();
  t->add_option("--alpha", tight.alpha)->capture_default_str();
  t->add_option("--threads", tight.threads)->capture_default_str();
  t->add_option("--out,-o", tight.out);
  t->add_option("--dump", tight.dump, "random layers of failing trials");
  tight.budget.add(t);

  VerifyArgs verify;
  auto *v = app.add_subcommand("verify-absorber", "check an absorbing gadget against its host");
  v->add_option("--input,-i", verify.input)->required()->check(CLI::ExistingFile);
  v->add_option("--gadget", verify.gadget)->required()->check(CLI::ExistingFile);
  v->add_option("--mode", verify.mode, "certificate | search")->capture_default_str();
  v->add_option("--absorb", verify.absorb_set, "print the path absorbing these vertices")->delimiter(',');
  verify.budget.add(v);

  RegArgs reg;
  auto *r = app.add_subcommand("regcheck", "epsilon-regularity of a pair or of a whole partition");
  r->add_option("--input,-i", reg.input)->required()->check(CLI::ExistingFile);
  auto *rp = r->add_option("--partition", reg.partition)->check(CLI::ExistingFile);
  auto *r1 = r->add_option("--v1", reg.v1)->delimiter(',')->excludes(rp);
  r->add_option("--v2", reg.v2)->delimiter(',')->needs(r1);
  r1->needs(r->get_option("--v2"));
  r->add_option("--layer", reg.layer, "gamma | random | combined")->capture_default_str();
  r->add_option("--eps", reg.eps)->capture_default_str();
  r->add_option("--d", reg.d, "density threshold of a reduced edge")->capture_default_str();
  r->add_option("--cap", reg.cap, "largest side decided exactly")->capture_default_str();
  r->add_option("--samples", reg.samples)->capture_default_str();
  r->add_option("--seed", reg.seed)->capture_default_str();
  r->add_flag("--degree-form", reg.degree_form)->needs(rp);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*g) {
      run_gen(gen);
    } else if (*s) {
      return run_search(search);
    } else if (*p) {
      return run_pipeline(pipe);
    } else if (*m) {
      run_mc(mc);
    } else if (*t) {
      run_tightness(tight);
    } else if (*v) {
      return run_verify(verify);
    } else if (*r) {
      if (reg.partition.empty() && reg.v1.empty())
        throw Error(ErrorKind::invalid_argument, "regcheck needs --partition or --v1/--v2");
      return run_regcheck(reg);
    }
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
