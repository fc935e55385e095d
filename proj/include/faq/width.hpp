#pragma once

#include <map>
#include <string>
#include <vector>

#include "faq/hypergraph.hpp"
#include "faq/queryshape.hpp"
#include "faq/rational.hpp"

namespace faq {

struct CoverSolution {
  std::map<int, Rat> weights;  // edge id → λ_S, every vertex covered to ≥ 1
  Rat objective;               // ∑ λ_S (or the log-weighted variant)
};

// Exact optimum of min ∑ λ_S subject to ∑_{S∋v} λ_S ≥ 1 for v ∈ B, λ ≥ 0.
// Throws a structural error when some vertex of B lies in no edge.
CoverSolution fractional_cover_number(const Hypergraph& h, const VertexSet& b);

// Minimum number of edges covering B; exhaustive branch and bound.
int integral_cover_number(const Hypergraph& h, const VertexSet& b);

struct AgmResult {
  double bound;       // ∏ sizes^λ for the log-optimal feasible λ
  double log2_bound;  // ∑ λ_S · log₂ size_S
  CoverSolution cover;
};

// Minimizes ∑ λ_S log₂|ψ_S| in double precision, then scales the weights to
// an exactly feasible rational cover; the reported bound uses the repaired
// weights, so it is always a valid upper bound and optimal to ~1e-9.
AgmResult agm_bound(const Hypergraph& h, const VertexSet& b,
                    const std::map<int, long long>& sizes);

enum class GWidthKind { CardMinusOne, Integral, Fractional };

// max over elimination steps of g(U_k); +∞ if some U_k is uncoverable.
ExtRat induced_g_width(const Hypergraph& h, const VariableOrdering& sigma,
                       GWidthKind g);

// max over free and semiring-aggregate positions of ρ*(U_k), with U_k from
// the product-aware elimination and covers over the original edges.
Rat faqw_of_ordering(const QueryShape& q, const VariableOrdering& sigma);

struct TreeDecomposition {
  std::vector<VertexSet> bags;
  std::vector<std::pair<int, int>> tree_edges;  // undirected, forms a tree
};

struct TdReport {
  bool valid = false;
  std::string violation;
};

TdReport validate_td(const Hypergraph& h, const TreeDecomposition& td);

// Merges every bag into a neighbor that contains it until none is nested.
TreeDecomposition reduce_td(const TreeDecomposition& td);

// Bag k = U_k ∪ {v_k}, attached to the latest-eliminated other member of
// U_k; reduced afterwards. Every remaining bag equals some U_k.
TreeDecomposition td_from_ordering(const Hypergraph& h,
                                   const VariableOrdering& sigma);

// Peels leaf bags of the reduced decomposition, emitting each leaf's
// private vertices; the reversed emission order is the ordering, whose
// every U_k fits inside some bag.
VariableOrdering ordering_from_td(const Hypergraph& h,
                                  const TreeDecomposition& td);

struct FhtwResult {
  Rat value;
  TreeDecomposition td;
  VariableOrdering ordering;
};

// Exact fractional hypertree width by dynamic programming over eliminated
// vertex subsets; n above the cap is a size error.
FhtwResult fhtw_exact(const Hypergraph& h, int n_cap = 14);

// Greedy min-ρ* elimination; value is an upper bound on fhtw.
FhtwResult fhtw_greedy(const Hypergraph& h);

// Max over components C of H−L of the independence number of U(C) with
// respect to the original edges meeting C; brute force, ≤ 20 candidate
// vertices per component.
int l_star_size(const Hypergraph& h, const VertexSet& l);

struct ComposedWidthBound {
  Rat bound;  // fhtw(outer) · max over outer edges of ρ*(inner cover of e)
  TreeDecomposition td;  // root-hanging construction, patched and reduced
};

ComposedWidthBound composed_width_bound(
    const Hypergraph& outer,
    const std::map<int, std::vector<VertexSet>>& family);

}  // namespace faq
