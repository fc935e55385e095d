#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "faq/vset.hpp"

namespace faq {

struct Edge {
  int id = 0;
  std::string name;  // defaults to "e<id>"
  VertexSet vars;    // sorted, duplicate-free; may be empty only transiently
};

// Multi-hypergraph on vertices 0..n-1. Edges keep stable ids; duplicate
// vertex sets are allowed and kept as distinct edges.
struct Hypergraph {
  int n = 0;
  std::vector<Edge> edges;

  static Hypergraph make(int n, const std::vector<VertexSet>& edge_sets);

  void validate() const;
  // Indices into `edges` (not ids) of edges containing v.
  std::vector<int> incident(Vertex v) const;
  const Edge* edge_by_id(int id) const;
  bool has_vertex_in_some_edge(Vertex v) const;
};

// A permutation of 0..n-1. sigma[0] is eliminated last, sigma[n-1] first.
using VariableOrdering = std::vector<Vertex>;

struct ElimStep {
  int k = 0;                  // position in sigma, 1-based; processed n..1
  Vertex v = -1;              // sigma[k-1], the variable eliminated here
  bool product = false;       // true when v is a product-aggregate variable
  std::vector<Edge> edges;    // edge set before this elimination
  std::vector<int> boundary;  // indices into `edges` of edges containing v
  VertexSet u;                // union of boundary edge vertex sets
};

struct EliminationSequence {
  std::vector<ElimStep> steps;  // steps[0] has k = n, steps.back() k = 1
};

// Runs the elimination recurrence along sigma. Variables in product_vars use
// the shrink rule (v is dropped from each incident edge); all others use the
// replace rule (incident edges are replaced by one edge on u minus v).
EliminationSequence elimination_sequence(const Hypergraph& h,
                                         const VariableOrdering& sigma,
                                         const VertexSet& product_vars = {});

// Connected components of the hypergraph restricted to vertices outside
// `removed`. Isolated remaining vertices form singleton components.
// Components are sorted; the list is ordered by smallest member.
std::vector<VertexSet> connected_components(const Hypergraph& h,
                                            const VertexSet& removed = {});

struct ExtendedComponent {
  VertexSet vars;           // component of H - L - W, widened by adjacent W
  std::vector<Edge> edges;  // restrictions S ∩ vars of edges meeting the core
};

struct ExtendedComponents {
  std::vector<ExtendedComponent> components;
  VertexSet dangling;  // W-vertices whose every edge lies inside L ∪ W
};

// Components of H - L - W, each widened by the W-vertices sharing an edge
// with it. W-vertices in no edge outside L ∪ W end up in `dangling`
// (isolated W-vertices included).
ExtendedComponents extended_components(const Hypergraph& h, const VertexSet& l,
                                       const VertexSet& w);

struct AcyclicityResult {
  bool acyclic = false;
  std::optional<VariableOrdering> witness;
};

// GYO-style greedy elimination. On success the witness ordering sigma makes
// every step's u equal some boundary edge (steps with empty boundary are
// exempt: an isolated vertex constrains nothing).
AcyclicityResult is_alpha_acyclic(const Hypergraph& h);

// Repeated nest-point removal. On success the witness is a nested
// elimination order: running elimination_sequence with every variable a
// product variable, each step's boundary edge sets form an inclusion chain.
AcyclicityResult is_beta_acyclic(const Hypergraph& h);

// Substitutes a hypergraph for every edge of the outer graph. Each family
// entry is keyed by outer edge id; its edge sets must cover exactly the
// outer edge's vertices. The result keeps one copy per distinct vertex set.
Hypergraph compose(const Hypergraph& outer,
                   const std::map<int, std::vector<VertexSet>>& family);

// Text format: first line "n <count>", then one line "e <name> v1 v2 ..."
// per edge. Blank lines and lines starting with '#' are skipped.
Hypergraph parse_hypergraph(const std::string& text);
std::string print_hypergraph(const Hypergraph& h);

}  // namespace faq
