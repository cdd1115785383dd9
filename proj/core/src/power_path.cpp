#include "powerlab/power_path.hpp"

#include "powerlab/error.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_set>

namespace powerlab {

namespace {

bool distinct(std::span<const Vertex> seq) {
  std::unordered_set<Vertex> seen;
  for (auto v : seq)
    if (!seen.insert(v).second)
      return false;
  return true;
}

} // namespace

PowerPath::PowerPath(VertexTuple vertices, int r) : vertices_(std::move(vertices)), r_(r) {
  if (r < 1)
    throw Error(ErrorKind::invalid_argument, "power must be positive");
  if (!distinct(vertices_))
    throw Error(ErrorKind::invalid_path, "path repeats a vertex");
}

PowerPath PowerPath::validated(const LayeredGraph &g, VertexTuple vertices, int r) {
  if (!is_power_path(g, vertices, r))
    throw Error(ErrorKind::invalid_path, "sequence is not a power path in the graph");
  return PowerPath(std::move(vertices), r);
}

bool is_power_path(const LayeredGraph &g, std::span<const Vertex> seq, int r) {
  for (auto v : seq)
    if (v >= g.order())
      return false;
  if (!distinct(seq))
    return false;
  for (std::size_t i = 0; i < seq.size(); ++i)
    for (std::size_t j = i + 1; j < seq.size() && j - i <= static_cast<std::size_t>(r); ++j)
      if (!g.adjacent(seq[i], seq[j], Layer::combined))
        return false;
  return true;
}

std::pair<VertexTuple, VertexTuple> endpoints(const PowerPath &p) {
  const auto width = static_cast<std::size_t>(p.r()) + 1;
  if (p.size() < width)
    throw Error(ErrorKind::too_short, "path has " + std::to_string(p.size()) +
                                          " vertices, endpoints need " + std::to_string(width));
  const auto &v = p.vertices();
  return {VertexTuple(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(width)),
          VertexTuple(v.end() - static_cast<std::ptrdiff_t>(width), v.end())};
}

PowerPath concat(const PowerPath &p, const PowerPath &q) {
  if (p.r() != q.r())
    throw Error(ErrorKind::invalid_argument, "paths of different powers");
  const auto [ps, pt] = endpoints(p);
  const auto [qs, qt] = endpoints(q);
  if (pt != qs)
    throw Error(ErrorKind::endpoint_mismatch, "end of first path is not the start of the second");
  std::unordered_set<Vertex> shared(pt.begin(), pt.end());
  std::unordered_set<Vertex> in_p(p.vertices().begin(), p.vertices().end());
  const auto width = pt.size();
  for (std::size_t i = width; i < q.size(); ++i)
    if (in_p.count(q.vertices()[i]))
      throw Error(ErrorKind::overlap_violation, "paths share a vertex outside the glued clique");
  auto merged = p.vertices();
  merged.insert(merged.end(), q.vertices().begin() + static_cast<std::ptrdiff_t>(width),
                q.vertices().end());
  return PowerPath(std::move(merged), p.r());
}

std::vector<Edge> skeleton(const PowerPath &p) {
  std::vector<Edge> out;
  const auto &v = p.vertices();
  for (std::size_t i = 0; i + 1 < v.size(); ++i)
    out.push_back(Edge::of(v[i], v[i + 1]));
  return out;
}

std::vector<Edge> required_pairs(const PowerPath &p) {
  std::vector<Edge> out;
  const auto &v = p.vertices();
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size() && j - i <= static_cast<std::size_t>(p.r()); ++j)
      out.push_back(Edge::of(v[i], v[j]));
  std::sort(out.begin(), out.end());
  return out;
}

bool is_bicanonical(const PowerPath &p, const SetTuple &sets) {
  if (p.size() != 2 * sets.size())
    throw Error(ErrorKind::length_mismatch, "bicanonical check needs |P| = 2|V|");
  for (std::size_t i = 0; i < sets.size(); ++i)
    if (!sets[i].contains(p.vertices()[2 * i]) || !sets[i].contains(p.vertices()[2 * i + 1]))
      return false;
  return true;
}

bool is_power_hamilton_cycle(const LayeredGraph &g, std::span<const Vertex> order, int r) {
  const std::size_t n = g.order();
  if (order.size() != n)
    throw Error(ErrorKind::not_permutation, "order length differs from n");
  std::vector<bool> seen(n, false);
  for (auto v : order) {
    if (v >= n || seen[v])
      throw Error(ErrorKind::not_permutation, "order is not a permutation of the vertices");
    seen[v] = true;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto gap = std::min(j - i, n - (j - i));
      if (gap <= static_cast<std::size_t>(r) && !g.adjacent(order[i], order[j], Layer::combined))
        return false;
    }
  return true;
}

PowerPath rev(const PowerPath &p) { return PowerPath(rev(p.vertices()), p.r()); }

std::string to_string(const PowerPath &p) {
  std::ostringstream out;
  out << "r=" << p.r();
  for (auto v : p.vertices())
    out << ' ' << v;
  return out.str();
}

PowerPath parse_power_path(const std::string &text) {
  std::istringstream in(text);
  std::string head;
  if (!(in >> head) || head.rfind("r=", 0) != 0)
    throw ParseError(1, "path must start with r=<r>");
  int r = 0;
  try {
    r = std::stoi(head.substr(2));
  } catch (const std::logic_error &) {
    throw ParseError(1, "bad power '" + head + "'");
  }
  VertexTuple vs;
  for (std::string tok; in >> tok;) {
    try {
      std::size_t used = 0;
      auto v = std::stoul(tok, &used);
      if (used != tok.size())
        throw std::invalid_argument(tok);
      vs.push_back(static_cast<Vertex>(v));
    } catch (const std::logic_error &) {
      throw ParseError(1, "bad vertex '" + tok + "'");
    }
  }
  return PowerPath(std::move(vs), r);
}

} // namespace powerlab
