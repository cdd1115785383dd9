#pragma once

#include "powerlab/graph.hpp"

#include <algorithm>
#include <vector>

namespace powerlab {

using VertexTuple = std::vector<Vertex>;
using SetTuple = std::vector<VertexSet>;

// Tuple positions are 1-based in the helpers below, matching how the
// constructions index their slots.

template <class T> std::vector<T> rev(std::vector<T> t) {
  std::reverse(t.begin(), t.end());
  return t;
}

/// First i elements.
template <class T> std::vector<T> prefix(const std::vector<T> &t, std::size_t i) {
  i = std::min(i, t.size());
  return std::vector<T>(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(i));
}

/// Elements i, i+1, ..., |t| (1-based); empty when i > |t|.
template <class T>
std::vector<T> suffix_from(const std::vector<T> &t, std::size_t i) {
  if (i == 0)
    i = 1;
  if (i > t.size())
    return {};
  return std::vector<T>(t.begin() + static_cast<std::ptrdiff_t>(i - 1), t.end());
}

template <class T>
std::vector<T> concat(std::vector<T> a, const std::vector<T> &b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

/// Removes X from every set of the tuple.
inline SetTuple subtract(SetTuple t, const VertexSet &x) {
  for (auto &s : t)
    s -= x;
  return t;
}

/// Drops tuple entries that belong to X, preserving order.
inline VertexTuple subtract(const VertexTuple &t, const VertexSet &x) {
  VertexTuple out;
  for (auto v : t)
    if (!x.contains(v))
      out.push_back(v);
  return out;
}

inline VertexSet to_set(std::size_t universe, const VertexTuple &t) {
  return VertexSet(universe, std::span<const Vertex>(t));
}

} // namespace powerlab
