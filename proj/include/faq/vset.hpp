#pragma once

#include <algorithm>
#include <vector>

namespace faq {

// Vertex sets are sorted, duplicate-free int vectors throughout.
using Vertex = int;
using VertexSet = std::vector<Vertex>;

inline VertexSet vs_normalize(VertexSet v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

inline bool vs_contains(const VertexSet& s, Vertex v) {
  return std::binary_search(s.begin(), s.end(), v);
}

inline VertexSet vs_union(const VertexSet& a, const VertexSet& b) {
  VertexSet r;
  r.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
  return r;
}

inline VertexSet vs_intersect(const VertexSet& a, const VertexSet& b) {
  VertexSet r;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
  return r;
}

inline VertexSet vs_minus(const VertexSet& a, const VertexSet& b) {
  VertexSet r;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
  return r;
}

inline bool vs_subset(const VertexSet& a, const VertexSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

inline bool vs_intersects(const VertexSet& a, const VertexSet& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j)
      ++i;
    else if (*j < *i)
      ++j;
    else
      return true;
  }
  return false;
}

inline VertexSet vs_remove(const VertexSet& a, Vertex v) {
  VertexSet r;
  r.reserve(a.size());
  for (Vertex x : a)
    if (x != v) r.push_back(x);
  return r;
}

}  // namespace faq
