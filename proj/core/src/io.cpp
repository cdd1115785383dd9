#include "powerlab/io.hpp"

#include "powerlab/error.hpp"

#include <charconv>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

namespace powerlab {

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

namespace {

std::string strip_comment(const std::string &line) {
  return trim(line.substr(0, line.find('#')));
}

std::uint64_t parse_uint(const std::string &tok, std::size_t line) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError(line, "expected a non-negative integer, got '" + tok + "'");
  return value;
}

} // namespace

LayeredGraph read_edge_list(std::istream &in) {
  std::string line;
  std::size_t lineno = 0;
  std::optional<std::size_t> n;
  std::vector<Edge> gamma, random;
  std::set<Edge> seen_gamma, seen_random;

  while (std::getline(in, line)) {
    ++lineno;
    auto body = strip_comment(line);
    if (body.empty())
      continue;
    std::istringstream fields(body);
    std::vector<std::string> tok;
    for (std::string t; fields >> t;)
      tok.push_back(t);

    if (!n) {
      if (tok.size() != 2 || tok[0] != "n")
        throw ParseError(lineno, "expected header 'n <count>'");
      n = parse_uint(tok[1], lineno);
      continue;
    }
    if (tok.size() != 3)
      throw ParseError(lineno, "expected 'u v g' or 'u v r'");
    const auto u = parse_uint(tok[0], lineno);
    const auto v = parse_uint(tok[1], lineno);
    if (u >= *n || v >= *n)
      throw ParseError(lineno, "endpoint outside [0, n)");
    if (u == v)
      throw ParseError(lineno, "self-loop");
    const auto e = Edge::of(static_cast<Vertex>(u), static_cast<Vertex>(v));
    if (tok[2] == "g") {
      if (!seen_gamma.insert(e).second)
        throw ParseError(lineno, "duplicate gamma pair");
      gamma.push_back(e);
    } else if (tok[2] == "r") {
      if (!seen_random.insert(e).second)
        throw ParseError(lineno, "duplicate random pair");
      random.push_back(e);
    } else {
      throw ParseError(lineno, "unknown layer tag '" + tok[2] + "'");
    }
  }
  if (!n)
    throw ParseError(lineno, "missing header 'n <count>'");
  return LayeredGraph(*n, gamma, random);
}

void write_edge_list(std::ostream &out, const LayeredGraph &g) {
  out << "n " << g.order() << '\n';
  for (const auto &e : g.edges(Layer::gamma))
    out << e.u << ' ' << e.v << " g\n";
  for (const auto &e : g.edges(Layer::random))
    out << e.u << ' ' << e.v << " r\n";
}

LayeredGraph load_edge_list(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorKind::io_error, "cannot open " + path);
  return read_edge_list(in);
}

void save_edge_list(const std::string &path, const LayeredGraph &g) {
  std::ofstream out(path);
  if (!out)
    throw Error(ErrorKind::io_error, "cannot write " + path);
  write_edge_list(out, g);
}

std::map<std::string, std::string> read_key_values(std::istream &in) {
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto body = strip_comment(line);
    if (body.empty())
      continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ParseError(lineno, "expected key=value");
    auto key = trim(body.substr(0, eq));
    if (key.empty())
      throw ParseError(lineno, "empty key");
    if (!kv.emplace(key, trim(body.substr(eq + 1))).second)
      throw ParseError(lineno, "repeated key '" + key + "'");
  }
  return kv;
}

void write_key_values(std::ostream &out, const std::map<std::string, std::string> &kv) {
  for (const auto &[k, v] : kv)
    out << k << '=' << v << '\n';
}

std::map<std::string, std::string> load_key_values(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorKind::io_error, "cannot open " + path);
  return read_key_values(in);
}

void save_key_values(const std::string &path, const std::map<std::string, std::string> &kv) {
  std::ofstream out(path);
  if (!out)
    throw Error(ErrorKind::io_error, "cannot write " + path);
  write_key_values(out, kv);
}

std::string format_double(double x) {
  std::ostringstream out;
  out.precision(17);
  out << x;
  std::string text = out.str();
  // Prefer the short form when it round-trips.
  for (int digits = 1; digits < 17; ++digits) {
    std::ostringstream shorter;
    shorter.precision(digits);
    shorter << x;
    if (std::stod(shorter.str()) == x)
      return shorter.str();
  }
  return text;
}

} // namespace powerlab
