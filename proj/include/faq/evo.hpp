#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "faq/query.hpp"
#include "faq/width.hpp"

namespace faq {

// Which expression-tree construction applies. AllSemiring: no product
// aggregates. IdempotentProduct: products present, every factor value lies in
// the query's idempotent set, ⊗ and every aggregate past the first product
// position are closed under it, and distinct admissible aggregates stay
// distinguishable on it. GeneralProduct: products present but those closure
// conditions fail; every edge is extended by the full product-variable set
// first, and only soundness of the resulting order set is claimed.
enum class Regime { AllSemiring, IdempotentProduct, GeneralProduct };

Regime detect_regime(const Query& q);

// Node tags: kTagFree for the free block, otherwise int(OpId); a node tagged
// int(OpId::Prod) is a product node.
constexpr int kTagFree = -1;
std::string tag_name(int tag);

struct TreeNode {
  VertexSet vars;
  int tag = kTagFree;
  int parent = -1;  // -1 for the root
  std::vector<int> children;
};

// Expression tree: nodes[0] is the root, a free-tagged block holding the
// free variables (empty when f = 0). Free and semiring variables appear in
// exactly one node; product variables may appear as copies in several.
struct ExpressionTree {
  Regime regime = Regime::AllSemiring;
  int n = 0;
  int f = 0;
  std::vector<TreeNode> nodes;
  // Semiring variables whose aggregate is not closed under the idempotent
  // set (IdempotentProduct regime only). Their partial results can leave the
  // set, and a product step raises any foreign partial result to the domain
  // size; so each of these must precede every product variable in any
  // equivalent ordering, and the poset adds those pairs.
  VertexSet unclosed_vars;

  bool is_product_node(int id) const { return nodes[id].tag == int(OpId::Prod); }
  VertexSet product_vars() const;
  // Checks structural invariants: tag-compressed (no same-tag parent/child),
  // free/semiring vars in exactly one node, product copies never nested, and
  // earlier product variables never strictly below later ones.
  void validate() const;
  std::string render() const;  // indented one-node-per-line listing
};

ExpressionTree expression_tree(const Query& q);

// Strict order over variables, transitively closed. u ≺ v iff some node
// containing u is a strict ancestor of some node containing v, plus the
// unclosed-before-product pairs recorded on the tree.
struct PrecedencePoset {
  int n = 0;
  int f = 0;
  std::vector<VertexSet> pred;  // pred[v] = all u with u ≺ v
  bool precedes(Vertex u, Vertex v) const { return vs_contains(pred[v], u); }
};

PrecedencePoset precedence_poset(const ExpressionTree& t);

struct LinExList {
  std::vector<VariableOrdering> orders;  // lexicographic; free prefix first
  bool truncated = false;
};

LinExList linear_extensions(const PrecedencePoset& p, uint64_t limit = 1000000);

// Component-wise equivalence of two free-prefix orderings, per the recursive
// definition (equal semiring head, or an order-free initial product block,
// per connected — extended, in product regimes — component). Identical
// orderings are trivially equivalent; otherwise, in the IdempotentProduct
// regime both orderings must keep every escape-capable semiring aggregate
// ahead of every product variable — without that, a product power is applied
// to a partial result outside the idempotent set and the values diverge.
bool is_cw_equivalent(const Query& q, const VariableOrdering& sigma,
                      const VariableOrdering& pi);

// True iff sigma is component-wise equivalent to some linear extension of
// the precedence poset; decided greedily against the tree structure, without
// enumerating extensions.
bool evo_contains(const Query& q, const VariableOrdering& sigma);

struct FaqwExactQuery {
  Rat value;
  VariableOrdering order;  // lexicographically least argmin
  bool truncated = false;  // LinEx enumeration hit the cap; value is best-so-far
};

FaqwExactQuery faqw_exact_query(const Query& q, uint64_t limit = 1000000);

// The width-relevant hypergraph of a tree node L, with one projected edge per
// original edge that avoids all counted descendants and one edge S_{L,C} per
// child subtree that touches it. Counted nodes are all nodes in AllSemiring,
// and semiring/free nodes in the product regimes.
struct NodeChildInfo {
  int child = -1;  // node id
  VertexSet s;     // S_{L,C} = L ∩ union of the child subtree's counted edges
  VertexSet u;     // U(child): union over strict ancestors A of A ∩ that same set
};

struct NodeHypergraphResult {
  Hypergraph h;               // 𝓗_L over local vertex ids
  std::vector<Vertex> vars;   // local id -> original variable
  std::vector<NodeChildInfo> children;
  VertexSet u_of_node;        // U(L) for L itself
};

NodeHypergraphResult node_hypergraph(const Query& q, const ExpressionTree& t,
                                     int node_id);

enum class FhtwOracle { Exact, Greedy };

struct ApproxResult {
  VariableOrdering order;
  Rat achieved;  // faqw of that ordering
};

// Per counted node, decomposes 𝓗_L with the chosen fhtw oracle, turns each
// decomposition into a block-local ordering, and splices the blocks along a
// deterministic linearization of the node/product-variable super-poset. The
// result is always a linear extension of the precedence poset; with the
// exact oracle its faqw is at most twice faqw_exact_query.
ApproxResult faqw_approx(const Query& q, FhtwOracle oracle = FhtwOracle::Exact);

}  // namespace faq
