#include "powerlab/generators.hpp"

#include "powerlab/error.hpp"
#include "powerlab/io.hpp"
#include "powerlab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace powerlab {

std::vector<Edge> gen_gnp(std::size_t n, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0))
    throw Error(ErrorKind::invalid_argument, "edge probability outside [0, 1]");
  std::vector<Edge> edges;
  Rng rng(seed);
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v)
      if (rng.bernoulli(p))
        edges.push_back({u, v});
  return edges;
}

std::vector<std::size_t> balanced_sizes(std::size_t n, std::size_t parts) {
  if (parts == 0)
    throw Error(ErrorKind::invalid_argument, "need at least one class");
  std::vector<std::size_t> sizes(parts, n / parts);
  for (std::size_t i = 0; i < n % parts; ++i)
    ++sizes[i];
  return sizes;
}

Construction gen_complete_multipartite(std::span<const std::size_t> class_sizes) {
  if (class_sizes.size() < 2)
    throw Error(ErrorKind::invalid_argument, "complete multipartite graph needs >= 2 classes");
  std::size_t n = 0;
  for (auto s : class_sizes)
    n += s;
  std::vector<std::size_t> cls(n);
  std::vector<VertexSet> parts;
  Vertex next = 0;
  for (std::size_t c = 0; c < class_sizes.size(); ++c) {
    parts.push_back(VertexSet::interval(n, next, next + static_cast<Vertex>(class_sizes[c])));
    for (std::size_t i = 0; i < class_sizes[c]; ++i)
      cls[next++] = c;
  }
  std::vector<Edge> edges;
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v)
      if (cls[u] != cls[v])
        edges.push_back({u, v});
  return {LayeredGraph(n, edges), std::move(parts)};
}

namespace {

Construction xy_with_size(std::size_t n, std::size_t x_size) {
  if (x_size < 1 || x_size >= n)
    throw Error(ErrorKind::invalid_argument, "X/Y construction needs 1 <= |X| < n");
  std::vector<Edge> edges;
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v)
      if (v >= x_size) // u in X and v in Y, or both in Y
        edges.push_back({u, v});
  std::vector<VertexSet> parts{VertexSet::interval(n, 0, static_cast<Vertex>(x_size)),
                               VertexSet::interval(n, static_cast<Vertex>(x_size),
                                                   static_cast<Vertex>(n))};
  return {LayeredGraph(n, edges), std::move(parts)};
}

} // namespace

Construction gen_xy_construction(std::size_t n, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0 / 3.0))
    throw Error(ErrorKind::invalid_alpha, "alpha must lie in (0, 1/3)");
  return xy_with_size(n, static_cast<std::size_t>(std::llround((1.0 / 3.0 - alpha) * n)));
}

Construction gen_xy_construction_experimental(std::size_t n, double alpha, int k) {
  if (k < 1)
    throw Error(ErrorKind::invalid_argument, "k must be positive");
  const double frac = 1.0 / (k + 1);
  if (!(alpha > 0.0 && alpha < frac))
    throw Error(ErrorKind::invalid_alpha, "alpha must lie in (0, 1/(k+1))");
  return xy_with_size(n, static_cast<std::size_t>(std::llround((frac - alpha) * n)));
}

LayeredGraph gen_dirac_random(std::size_t n, std::size_t delta_min,
                              std::uint64_t seed, std::size_t max_attempts) {
  if (n == 0 || delta_min > n - 1)
    throw Error(ErrorKind::invalid_argument, "delta_min must be at most n - 1");
  const double q = n > 1 ? static_cast<double>(delta_min) / static_cast<double>(n - 1) : 0.0;
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    const auto attempt_seed = derive_seed(seed, attempt);
    auto edges = gen_gnp(n, q, attempt_seed);
    LayeredGraph g(n, edges);

    // Repair pass: one extra edge at each vertex that is still short.
    Rng rng(mix64(attempt_seed));
    std::vector<VertexSet> rows;
    for (Vertex v = 0; v < n; ++v)
      rows.push_back(g.neighbors(v, Layer::gamma));
    for (Vertex v = 0; v < n; ++v) {
      if (rows[v].size() >= delta_min)
        continue;
      auto missing = (VertexSet::full(n) - rows[v]).to_vector();
      missing.erase(std::remove(missing.begin(), missing.end(), v), missing.end());
      if (missing.empty())
        continue;
      const Vertex w = missing[rng.below(missing.size())];
      rows[v].insert(w);
      rows[w].insert(v);
      edges.push_back(Edge::of(v, w));
    }
    LayeredGraph repaired(n, edges);
    if (min_degree(repaired, Layer::gamma) >= delta_min)
      return repaired;
  }
  throw Error(ErrorKind::exhausted, "no graph with the requested minimum degree after " +
                                        std::to_string(max_attempts) + " attempts");
}

LayeredGraph perturb(const LayeredGraph &gamma_graph, double p, std::uint64_t seed) {
  auto random = gen_gnp(gamma_graph.order(), p, seed);
  return gamma_graph.with_random_layer(random);
}

Construction gen_blowup(const LayeredGraph &base, std::size_t class_size) {
  const std::size_t t = base.order();
  const std::size_t n = t * class_size;
  std::vector<Edge> edges;
  for (const auto &e : base.edges(Layer::gamma))
    for (std::size_t a = 0; a < class_size; ++a)
      for (std::size_t b = 0; b < class_size; ++b)
        edges.push_back(Edge::of(static_cast<Vertex>(e.u * class_size + a),
                                 static_cast<Vertex>(e.v * class_size + b)));
  std::sort(edges.begin(), edges.end());
  std::vector<VertexSet> parts;
  for (std::size_t i = 0; i < t; ++i)
    parts.push_back(VertexSet::interval(n, static_cast<Vertex>(i * class_size),
                                        static_cast<Vertex>((i + 1) * class_size)));
  return {LayeredGraph(n, edges), std::move(parts)};
}

std::string to_string(ModelKind kind) {
  switch (kind) {
  case ModelKind::gnp: return "gnp";
  case ModelKind::complete_multipartite: return "complete_multipartite";
  case ModelKind::xy_construction: return "xy_construction";
  case ModelKind::dirac_random: return "dirac_random";
  case ModelKind::perturbed: return "perturbed";
  }
  return "unknown";
}

ModelKind model_kind_from_string(const std::string &text) {
  for (auto kind : {ModelKind::gnp, ModelKind::complete_multipartite,
                    ModelKind::xy_construction, ModelKind::dirac_random,
                    ModelKind::perturbed})
    if (to_string(kind) == text)
      return kind;
  throw Error(ErrorKind::invalid_argument, "unknown model kind '" + text + "'");
}

double ModelConfig::probability() const {
  if (!is_constant)
    return p_or_C;
  if (n == 0)
    return 0.0;
  return std::min(1.0, p_or_C / static_cast<double>(n));
}

std::map<std::string, std::string> ModelConfig::to_key_values() const {
  std::map<std::string, std::string> kv;
  kv["kind"] = to_string(kind);
  kv["n"] = std::to_string(n);
  kv["k"] = std::to_string(k);
  kv["alpha"] = format_double(alpha);
  kv[is_constant ? "C" : "p"] = format_double(p_or_C);
  kv["seed"] = std::to_string(seed);
  if (!class_sizes.empty()) {
    std::string joined;
    for (auto s : class_sizes)
      joined += (joined.empty() ? "" : ",") + std::to_string(s);
    kv["classes"] = joined;
  }
  if (experimental)
    kv["experimental"] = "1";
  return kv;
}

ModelConfig ModelConfig::from_key_values(const std::map<std::string, std::string> &kv) {
  ModelConfig cfg;
  auto get = [&](const char *key) -> const std::string * {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  try {
    if (auto v = get("kind"))
      cfg.kind = model_kind_from_string(*v);
    if (auto v = get("n"))
      cfg.n = std::stoull(*v);
    if (auto v = get("k"))
      cfg.k = std::stoi(*v);
    if (auto v = get("alpha"))
      cfg.alpha = std::stod(*v);
    if (auto v = get("p")) {
      cfg.p_or_C = std::stod(*v);
      cfg.is_constant = false;
    }
    if (auto v = get("C")) {
      cfg.p_or_C = std::stod(*v);
      cfg.is_constant = true;
    }
    if (auto v = get("seed"))
      cfg.seed = std::stoull(*v);
    if (auto v = get("classes")) {
      std::stringstream in(*v);
      std::string item;
      while (std::getline(in, item, ','))
        if (!item.empty())
          cfg.class_sizes.push_back(std::stoull(item));
    }
    if (auto v = get("experimental"))
      cfg.experimental = (*v == "1" || *v == "true");
  } catch (const std::logic_error &e) {
    throw Error(ErrorKind::invalid_argument, std::string("bad model config value: ") + e.what());
  }
  const double p = cfg.probability();
  if (!(p >= 0.0 && p <= 1.0))
    throw Error(ErrorKind::invalid_argument, "edge probability outside [0, 1]");
  return cfg;
}

Construction build_model(const ModelConfig &cfg) {
  const auto gamma_seed = derive_seed(cfg.seed, 0);
  const auto random_seed = derive_seed(cfg.seed, 1);
  const double p = cfg.probability();
  Construction out;
  switch (cfg.kind) {
  case ModelKind::gnp:
    out.graph = LayeredGraph(cfg.n, gen_gnp(cfg.n, p, gamma_seed));
    return out;
  case ModelKind::complete_multipartite: {
    auto sizes = cfg.class_sizes.empty()
                     ? balanced_sizes(cfg.n, static_cast<std::size_t>(cfg.k + 1))
                     : cfg.class_sizes;
    out = gen_complete_multipartite(sizes);
    break;
  }
  case ModelKind::xy_construction:
    out = cfg.experimental ? gen_xy_construction_experimental(cfg.n, cfg.alpha, cfg.k)
                           : gen_xy_construction(cfg.n, cfg.alpha);
    break;
  case ModelKind::dirac_random:
  case ModelKind::perturbed: {
    const double frac = static_cast<double>(cfg.k) / (cfg.k + 1) + cfg.alpha;
    auto delta = static_cast<std::size_t>(std::ceil(frac * static_cast<double>(cfg.n) - 1e-9));
    delta = std::min(delta, cfg.n == 0 ? 0 : cfg.n - 1);
    out.graph = gen_dirac_random(cfg.n, delta, gamma_seed, 1000);
    if (cfg.kind == ModelKind::dirac_random)
      return out;
    break;
  }
  }
  if (p > 0.0)
    out.graph = perturb(out.graph, p, random_seed);
  return out;
}

} // namespace powerlab
