#pragma once

#include <string>
#include <vector>

#include "faq/factor.hpp"
#include "faq/queryshape.hpp"
#include "faq/semiring.hpp"

namespace faq {

// A full query instance: shape (hypergraph, free prefix, aggregate tags),
// semiring family, per-variable domain dictionaries, and one listing factor
// per edge. `idempotent_set` optionally declares the value set 𝔻_I used by
// the product-aggregate machinery; empty means the default {𝟎, 𝟏}.
struct Query {
  SemiringSpec spec;
  QueryShape shape;
  std::vector<std::vector<std::string>> domains;  // per variable: ordinal → label
  std::vector<ListingFactor> factors;             // aligned with shape.h.edges
  MissingPolicy missing = MissingPolicy::ZeroAbsent;
  std::vector<SemiringValue> idempotent_set;

  int n() const { return shape.h.n; }
  uint32_t domain_size(Vertex v) const { return uint32_t(domains[v].size()); }

  // Declared 𝔻_I, or the default {𝟎, 𝟏} when none was declared.
  std::vector<SemiringValue> di_set() const;
  // Whether a ⊕ op (or ⊗ for OpId::Prod) maps di × di into di.
  bool op_closed_under_di(OpId op) const;
  // Whether every stored factor value lies in di (𝟎 is implicit everywhere).
  bool values_within_di() const;
  // Whether two admissible ⊕ ops agree pointwise on di × di.
  bool ops_identical_on_di(OpId a, OpId b) const;

  void validate() const;
};

}  // namespace faq
