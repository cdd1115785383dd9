#pragma once

#include "powerlab/graph.hpp"

#include <iosfwd>
#include <map>
#include <string>

namespace powerlab {

/// Layered edge-list text format:
///
///     # comment
///     n 5
///     0 1 g
///     1 2 r
///
/// A pair repeated within one layer is a parse error. A pair listed in both
/// layers is kept in gamma only.
LayeredGraph read_edge_list(std::istream &in);
void write_edge_list(std::ostream &out, const LayeredGraph &g);

LayeredGraph load_edge_list(const std::string &path);
void save_edge_list(const std::string &path, const LayeredGraph &g);

/// `key=value` lines; blank lines and `#` comments are skipped. Whitespace
/// around keys and values is trimmed. Repeated keys are a parse error.
std::map<std::string, std::string> read_key_values(std::istream &in);
void write_key_values(std::ostream &out, const std::map<std::string, std::string> &kv);

std::map<std::string, std::string> load_key_values(const std::string &path);
void save_key_values(const std::string &path, const std::map<std::string, std::string> &kv);

std::string trim(const std::string &s);

/// Shortest text that reads back as the same double.
std::string format_double(double x);

} // namespace powerlab
