#pragma once

#include <vector>

#include "faq/hypergraph.hpp"
#include "faq/semiring.hpp"

namespace faq {

// The combinatorial part of a query: its hypergraph, how many leading
// variables are free, and the aggregate operator attached to each bound
// variable. OpId::Prod marks a product aggregate; anything else is a
// semiring aggregate. Entries below f are ignored.
struct QueryShape {
  Hypergraph h;
  int f = 0;  // free variables are 0..f-1
  std::vector<OpId> agg;

  void validate() const;
  bool is_free(Vertex v) const { return v < f; }
  bool is_product(Vertex v) const { return v >= f && agg[v] == OpId::Prod; }
  // Free and semiring-aggregate variables: the positions whose widths count.
  bool in_k_set(Vertex v) const { return v < f || agg[v] != OpId::Prod; }
  VertexSet product_vars() const;
  VertexSet k_set() const;
};

}  // namespace faq
