#include "faq/evo.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

#include "faq/error.hpp"
#include "faq/width.hpp"

namespace faq {

namespace {

struct SeqItem {
  Vertex v;
  int tag;
};

VertexSet complement_of(int n_total, const VertexSet& keep) {
  VertexSet out;
  for (int v = 0; v < n_total; ++v)
    if (!vs_contains(keep, v)) out.push_back(v);
  return out;
}

std::vector<SeqItem> restrict_seq(const std::vector<SeqItem>& seq, const VertexSet& keep) {
  std::vector<SeqItem> out;
  out.reserve(keep.size());
  for (const auto& it : seq)
    if (vs_contains(keep, it.v)) out.push_back(it);
  return out;
}

// {S ∩ keep : S ∩ must_meet ≠ ∅}, empties dropped.
std::vector<VertexSet> restrict_edges(const std::vector<VertexSet>& edges, const VertexSet& keep,
                                      const VertexSet& must_meet) {
  std::vector<VertexSet> out;
  for (const auto& s : edges) {
    if (!vs_intersects(s, must_meet)) continue;
    VertexSet r = vs_intersect(s, keep);
    if (!r.empty()) out.push_back(std::move(r));
  }
  return out;
}

std::vector<VertexSet> drop_vars(const std::vector<VertexSet>& edges, const VertexSet& gone) {
  std::vector<VertexSet> out;
  out.reserve(edges.size());
  for (const auto& s : edges) {
    VertexSet r = vs_minus(s, gone);
    if (!r.empty()) out.push_back(std::move(r));
  }
  return out;
}

// For component c: the component plus every product variable sharing an edge
// with it.
VertexSet pull_adjacent(const VertexSet& c, const VertexSet& w_set,
                        const std::vector<VertexSet>& edges) {
  VertexSet pulled = c;
  for (const auto& s : edges)
    if (vs_intersects(s, c)) pulled = vs_union(pulled, vs_intersect(s, w_set));
  return pulled;
}

struct Arena {
  std::vector<TreeNode> nodes;

  int add(VertexSet vars, int tag, int parent) {
    TreeNode nd;
    nd.vars = std::move(vars);
    nd.tag = tag;
    nd.parent = parent;
    nodes.push_back(std::move(nd));
    int id = int(nodes.size()) - 1;
    if (parent >= 0) nodes[size_t(parent)].children.push_back(id);
    return id;
  }
};

// One construction level: consume the leading same-tag block, split the
// remaining semiring variables into connected components and recurse into
// each together with its adjacent product variables, then hang the product
// remainders of fully consumed edges — plus any product variable in no edge
// at all — as one dangling block.
void build_rec(Arena& a, int parent, int n_total, const std::vector<SeqItem>& seq,
               const std::vector<VertexSet>& edges) {
  if (seq.empty()) return;
  int tag = seq[0].tag;
  VertexSet block;
  size_t i = 0;
  while (i < seq.size() && seq[i].tag == tag) block.push_back(seq[i++].v);
  block = vs_normalize(block);
  int me = a.add(block, tag, parent);

  VertexSet w_set, rest_sem;
  for (size_t j = i; j < seq.size(); ++j) {
    if (seq[j].tag == int(OpId::Prod)) w_set.push_back(seq[j].v);
    else rest_sem.push_back(seq[j].v);
  }
  w_set = vs_normalize(w_set);
  rest_sem = vs_normalize(rest_sem);

  if (!rest_sem.empty()) {
    Hypergraph h = Hypergraph::make(n_total, edges);
    auto comps = connected_components(h, complement_of(n_total, rest_sem));
    for (const auto& c : comps) {
      VertexSet pulled = pull_adjacent(c, w_set, edges);
      build_rec(a, me, n_total, restrict_seq(seq, pulled), restrict_edges(edges, pulled, c));
    }
  }

  VertexSet dangling, touched;
  for (const auto& s : edges) {
    touched = vs_union(touched, vs_intersect(s, w_set));
    if (vs_subset(vs_minus(s, block), w_set))
      dangling = vs_union(dangling, vs_intersect(s, w_set));
  }
  dangling = vs_union(dangling, vs_minus(w_set, touched));
  if (!dangling.empty()) a.add(dangling, int(OpId::Prod), me);
}

// Merge every same-tag parent/child pair, splicing the child's children into
// its slot, until none remain.
void compress(Arena& a) {
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<int> queue{0};
    for (size_t qi = 0; qi < queue.size() && !changed; ++qi) {
      int p = queue[qi];
      TreeNode& pn = a.nodes[size_t(p)];
      for (size_t ci = 0; ci < pn.children.size(); ++ci) {
        int c = pn.children[ci];
        if (a.nodes[size_t(c)].tag != pn.tag) continue;
        pn.vars = vs_union(pn.vars, a.nodes[size_t(c)].vars);
        std::vector<int> grafted = a.nodes[size_t(c)].children;
        pn.children.erase(pn.children.begin() + long(ci));
        pn.children.insert(pn.children.begin() + long(ci), grafted.begin(), grafted.end());
        for (int g : grafted) a.nodes[size_t(g)].parent = p;
        a.nodes[size_t(c)].children.clear();
        changed = true;
        break;
      }
      if (!changed)
        for (int c : pn.children) queue.push_back(c);
    }
  }
}

ExpressionTree renumber_preorder(const Arena& a) {
  ExpressionTree t;
  std::function<void(int, int)> visit = [&](int old, int parent_new) {
    int id = int(t.nodes.size());
    TreeNode nd;
    nd.vars = a.nodes[size_t(old)].vars;
    nd.tag = a.nodes[size_t(old)].tag;
    nd.parent = parent_new;
    t.nodes.push_back(std::move(nd));
    if (parent_new >= 0) t.nodes[size_t(parent_new)].children.push_back(id);
    for (int c : a.nodes[size_t(old)].children) visit(c, id);
  };
  visit(0, -1);
  return t;
}

// Position-ordered items; the reserved head index n stands in for the free
// block so a leading free node exists even when f = 0.
std::vector<SeqItem> full_seq(const QueryShape& sh) {
  std::vector<SeqItem> seq;
  seq.push_back({sh.h.n, kTagFree});
  for (int v = 0; v < sh.h.n; ++v)
    seq.push_back({v, v < sh.f ? kTagFree : int(sh.agg[size_t(v)])});
  return seq;
}

// Working copy of the edge sets. The general regime extends every edge by
// the full product set, and gives every edge-free variable a synthetic edge
// to that set — otherwise an aggregate over such a variable could drift past
// a product step that would then power its scalar result.
std::vector<VertexSet> prepared_edges(const Query& q, Regime regime) {
  std::vector<VertexSet> edges;
  edges.reserve(q.shape.h.edges.size());
  for (const auto& e : q.shape.h.edges) edges.push_back(e.vars);
  if (regime == Regime::GeneralProduct) {
    VertexSet prods = q.shape.product_vars();
    for (auto& s : edges) s = vs_union(s, prods);
    VertexSet covered;
    for (const auto& s : edges) covered = vs_union(covered, s);
    for (int v = 0; v < q.n(); ++v)
      if (!vs_contains(covered, v)) edges.push_back(vs_union({v}, prods));
  }
  return edges;
}

VertexSet unclosed_set(const Query& q) {
  VertexSet out;
  for (int v = q.shape.f; v < q.n(); ++v)
    if (!q.shape.is_product(v) && !q.op_closed_under_di(q.shape.agg[size_t(v)]))
      out.push_back(v);
  return out;
}

bool respects_escape_zone(const Query& q, const VertexSet& unclosed, const VariableOrdering& s) {
  std::vector<int> pos(size_t(q.n()));
  for (int i = 0; i < q.n(); ++i) pos[size_t(s[size_t(i)])] = i;
  for (Vertex u : unclosed)
    for (int w = q.shape.f; w < q.n(); ++w)
      if (q.shape.is_product(w) && pos[size_t(u)] > pos[size_t(w)]) return false;
  return true;
}

bool free_first_perm(const QueryShape& sh, const VariableOrdering& s) {
  if (int(s.size()) != sh.h.n) return false;
  std::vector<char> seen(size_t(sh.h.n), 0);
  for (Vertex v : s) {
    if (v < 0 || v >= sh.h.n || seen[size_t(v)]) return false;
    seen[size_t(v)] = 1;
  }
  for (int i = 0; i < sh.f; ++i)
    if (s[size_t(i)] >= sh.f) return false;
  return true;
}

// Emits every linear extension in lexicographic order; emit() returning
// false aborts. Returns true iff the enumeration ran to completion.
bool enumerate_extensions(const PrecedencePoset& p,
                          const std::function<bool(const VariableOrdering&)>& emit) {
  int n = p.n;
  std::vector<std::vector<Vertex>> succ(static_cast<size_t>(n));
  std::vector<int> unmet(size_t(n), 0);
  for (int v = 0; v < n; ++v) {
    unmet[size_t(v)] = int(p.pred[size_t(v)].size());
    for (Vertex u : p.pred[size_t(v)]) succ[size_t(u)].push_back(v);
  }
  std::vector<char> placed(size_t(n), 0);
  VariableOrdering cur;
  cur.reserve(size_t(n));
  std::function<bool()> rec = [&]() -> bool {
    if (int(cur.size()) == n) return emit(cur);
    for (int v = 0; v < n; ++v) {
      if (placed[size_t(v)] || unmet[size_t(v)] > 0) continue;
      placed[size_t(v)] = 1;
      for (Vertex w : succ[size_t(v)]) --unmet[size_t(w)];
      cur.push_back(v);
      bool keep = rec();
      cur.pop_back();
      for (Vertex w : succ[size_t(v)]) ++unmet[size_t(w)];
      placed[size_t(v)] = 0;
      if (!keep) return false;
    }
    return true;
  };
  return rec();
}

// Shared recursion for equivalence checks: both orderings list the same
// variable set; edges hold only those variables.
bool cw_rec(const QueryShape& sh, const std::vector<Vertex>& u, const std::vector<Vertex>& v,
            const std::vector<VertexSet>& edges, int n_total) {
  if (u.empty()) return true;
  if (u == v) return true;
  VertexSet uset(u.begin(), u.end());
  uset = vs_normalize(uset);
  VertexSet w_set, sem;
  for (Vertex x : uset) (sh.is_product(x) ? w_set : sem).push_back(x);
  if (sem.empty()) return true;  // pure product block: order-free

  Hypergraph h = Hypergraph::make(n_total, edges);
  auto comps = connected_components(h, complement_of(n_total, sem));
  auto restricted = [&](const std::vector<Vertex>& order, const VertexSet& keep) {
    std::vector<Vertex> out;
    for (Vertex x : order)
      if (vs_contains(keep, x)) out.push_back(x);
    return out;
  };
  if (comps.size() >= 2) {
    for (const auto& c : comps) {
      VertexSet pulled = pull_adjacent(c, w_set, edges);
      if (!cw_rec(sh, restricted(u, pulled), restricted(v, pulled),
                  restrict_edges(edges, pulled, c), n_total))
        return false;
    }
    return true;
  }

  VertexSet pulled = pull_adjacent(comps[0], w_set, edges);
  if (pulled != uset)  // shed products dangling off this component
    return cw_rec(sh, restricted(u, pulled), restricted(v, pulled),
                  restrict_edges(edges, pulled, comps[0]), n_total);

  Vertex head = u[0];
  if (!sh.is_product(head)) {
    if (v[0] != head) return false;
    std::vector<Vertex> ru(u.begin() + 1, u.end()), rv(v.begin() + 1, v.end());
    return cw_rec(sh, ru, rv, drop_vars(edges, {head}), n_total);
  }
  for (size_t p = 1; p <= u.size(); ++p) {
    if (!sh.is_product(u[p - 1]) || !sh.is_product(v[p - 1])) break;
    VertexSet bu(u.begin(), u.begin() + long(p));
    VertexSet bv(v.begin(), v.begin() + long(p));
    if (vs_normalize(bu) != vs_normalize(bv)) continue;
    std::vector<Vertex> ru(u.begin() + long(p), u.end()), rv(v.begin() + long(p), v.end());
    if (cw_rec(sh, ru, rv, drop_vars(edges, vs_normalize(bu)), n_total)) return true;
  }
  return false;
}

// Greedy membership recursion: match sigma's suffix against the canonical
// leading block of each subproblem. The block is recomputed by rebuilding
// the subproblem's tree, because consuming part of a block can re-split or
// re-merge what remains.
bool greedy_rec(const QueryShape& sh, const std::vector<Vertex>& u,
                const std::vector<VertexSet>& edges, int n_total) {
  if (u.empty()) return true;
  VertexSet uset(u.begin(), u.end());
  uset = vs_normalize(uset);
  VertexSet w_set, sem;
  for (Vertex x : uset) (sh.is_product(x) ? w_set : sem).push_back(x);
  if (sem.empty()) return true;

  Hypergraph h = Hypergraph::make(n_total, edges);
  auto comps = connected_components(h, complement_of(n_total, sem));
  auto restricted = [&](const VertexSet& keep) {
    std::vector<Vertex> out;
    for (Vertex x : u)
      if (vs_contains(keep, x)) out.push_back(x);
    return out;
  };
  if (comps.size() >= 2) {
    for (const auto& c : comps) {
      VertexSet pulled = pull_adjacent(c, w_set, edges);
      if (!greedy_rec(sh, restricted(pulled), restrict_edges(edges, pulled, c), n_total))
        return false;
    }
    return true;
  }
  VertexSet pulled = pull_adjacent(comps[0], w_set, edges);
  if (pulled != uset)
    return greedy_rec(sh, restricted(pulled), restrict_edges(edges, pulled, comps[0]), n_total);

  Arena a;
  std::vector<SeqItem> seq;
  seq.push_back({n_total - 1, kTagFree});
  for (Vertex x : uset) seq.push_back({x, int(sh.agg[size_t(x)])});
  // Keep only edges meeting the component: an all-product edge would hang a
  // dangling copy directly under the synthetic root, but its variables carry
  // no order constraints of their own here (they are either adjacent to the
  // component through some mixed edge, or already shed by the pull step).
  build_rec(a, -1, n_total, seq, restrict_edges(edges, pulled, comps[0]));
  compress(a);
  require(a.nodes[0].children.size() == 1, ErrKind::Internal,
          "single component must yield a single leading block");
  const TreeNode& lead = a.nodes[size_t(a.nodes[0].children[0])];

  if (lead.tag != int(OpId::Prod)) {
    if (!vs_contains(lead.vars, u[0])) return false;
    std::vector<Vertex> ru(u.begin() + 1, u.end());
    return greedy_rec(sh, ru, drop_vars(edges, {u[0]}), n_total);
  }
  for (size_t p = 1; p <= u.size(); ++p) {
    if (!sh.is_product(u[p - 1]) || !vs_contains(lead.vars, u[p - 1])) break;
    VertexSet b(u.begin(), u.begin() + long(p));
    b = vs_normalize(b);
    std::vector<Vertex> ru(u.begin() + long(p), u.end());
    if (greedy_rec(sh, ru, drop_vars(edges, b), n_total)) return true;
  }
  return false;
}

std::vector<VertexSet> bound_edges(const Query& q, Regime regime) {
  std::vector<VertexSet> edges = prepared_edges(q, regime);
  VertexSet frees;
  for (int v = 0; v < q.shape.f; ++v) frees.push_back(v);
  return drop_vars(edges, frees);
}

}  // namespace

std::string tag_name(int tag) { return tag == kTagFree ? "free" : op_name(OpId(tag)); }

Regime detect_regime(const Query& q) {
  q.validate();
  bool any_prod = false;
  for (int v = q.shape.f; v < q.n(); ++v)
    if (q.shape.is_product(v)) any_prod = true;
  if (!any_prod) return Regime::AllSemiring;

  std::vector<SemiringValue> di = q.di_set();
  bool zero_in = false, one_in = false;
  for (const auto& x : di) {
    if (q.spec.equal(x, q.spec.zero())) zero_in = true;
    if (q.spec.equal(x, q.spec.one())) one_in = true;
  }
  if (!zero_in || !one_in) return Regime::GeneralProduct;
  if (!q.op_closed_under_di(OpId::Prod)) return Regime::GeneralProduct;
  if (!q.values_within_di()) return Regime::GeneralProduct;

  int first_prod = q.n();
  for (int v = q.shape.f; v < q.n(); ++v)
    if (q.shape.is_product(v)) {
      first_prod = v;
      break;
    }
  for (int v = first_prod + 1; v < q.n(); ++v)
    if (!q.shape.is_product(v) && !q.op_closed_under_di(q.shape.agg[size_t(v)]))
      return Regime::GeneralProduct;

  // Distinct aggregate ops that collapse on the set would make block
  // boundaries meaningless; treat such queries conservatively.
  std::vector<OpId> used;
  for (int v = q.shape.f; v < q.n(); ++v)
    if (!q.shape.is_product(v)) used.push_back(q.shape.agg[size_t(v)]);
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  for (size_t i = 0; i < used.size(); ++i)
    for (size_t j = i + 1; j < used.size(); ++j)
      if (q.ops_identical_on_di(used[i], used[j])) return Regime::GeneralProduct;
  return Regime::IdempotentProduct;
}

VertexSet ExpressionTree::product_vars() const {
  VertexSet out;
  for (const auto& nd : nodes)
    if (nd.tag == int(OpId::Prod)) out = vs_union(out, nd.vars);
  return out;
}

void ExpressionTree::validate() const {
  require(!nodes.empty(), ErrKind::Internal, "tree has no root");
  require(nodes[0].parent == -1 && nodes[0].tag == kTagFree, ErrKind::Internal, "malformed root");
  std::vector<std::vector<int>> holders(static_cast<size_t>(n));
  for (size_t i = 0; i < nodes.size(); ++i) {
    const TreeNode& nd = nodes[i];
    if (i > 0) {
      require(nd.parent >= 0 && nd.parent < int(nodes.size()), ErrKind::Internal,
              "bad parent link");
      require(nodes[size_t(nd.parent)].tag != nd.tag, ErrKind::Internal,
              "same-tag parent/child survived compression");
    }
    for (int c : nd.children)
      require(c > 0 && c < int(nodes.size()) && nodes[size_t(c)].parent == int(i),
              ErrKind::Internal, "bad child link");
    for (Vertex v : nd.vars) {
      require(v >= 0 && v < n, ErrKind::Internal, "variable out of range");
      require(i == 0 || v >= f, ErrKind::Internal, "free variable outside the root");
      holders[size_t(v)].push_back(int(i));
    }
  }
  auto strictly_above = [&](int a, int b) {
    for (int cur = nodes[size_t(b)].parent; cur != -1; cur = nodes[size_t(cur)].parent)
      if (cur == a) return true;
    return false;
  };
  for (int v = 0; v < n; ++v) {
    require(!holders[size_t(v)].empty(), ErrKind::Internal, "variable missing from the tree");
    bool prod_copies = true;
    for (int id : holders[size_t(v)])
      if (nodes[size_t(id)].tag != int(OpId::Prod)) prod_copies = false;
    if (!prod_copies)
      require(holders[size_t(v)].size() == 1, ErrKind::Internal,
              "non-product variable appears in several nodes");
    for (int a : holders[size_t(v)])
      for (int b : holders[size_t(v)])
        if (a != b)
          require(!strictly_above(a, b), ErrKind::Internal, "nested copies of one variable");
  }
}

std::string ExpressionTree::render() const {
  std::ostringstream out;
  std::function<void(int, int)> rec = [&](int id, int depth) {
    const TreeNode& nd = nodes[size_t(id)];
    for (int i = 0; i < depth; ++i) out << "  ";
    out << tag_name(nd.tag) << " {";
    for (size_t i = 0; i < nd.vars.size(); ++i) out << (i ? "," : "") << "x" << nd.vars[i];
    out << "}\n";
    for (int c : nd.children) rec(c, depth + 1);
  };
  rec(0, 0);
  return out.str();
}

ExpressionTree expression_tree(const Query& q) {
  Regime regime = detect_regime(q);
  Arena a;
  build_rec(a, -1, q.n() + 1, full_seq(q.shape), prepared_edges(q, regime));
  compress(a);
  ExpressionTree t = renumber_preorder(a);
  t.regime = regime;
  t.n = q.n();
  t.f = q.shape.f;
  t.nodes[0].vars = vs_remove(t.nodes[0].vars, q.n());
  if (regime == Regime::IdempotentProduct) t.unclosed_vars = unclosed_set(q);
  return t;
}

PrecedencePoset precedence_poset(const ExpressionTree& t) {
  PrecedencePoset p;
  p.n = t.n;
  p.f = t.f;
  std::vector<std::vector<char>> rel(size_t(t.n), std::vector<char>(size_t(t.n), 0));
  std::function<void(int, const VertexSet&)> walk = [&](int id, const VertexSet& above) {
    const TreeNode& nd = t.nodes[size_t(id)];
    for (Vertex u : above)
      for (Vertex v : nd.vars) {
        require(u != v, ErrKind::Internal, "variable above itself");
        rel[size_t(u)][size_t(v)] = 1;
      }
    VertexSet below = vs_union(above, nd.vars);
    for (int c : nd.children) walk(c, below);
  };
  walk(0, {});

  VertexSet prods = t.product_vars();
  for (Vertex u : t.unclosed_vars)
    for (Vertex w : prods) rel[size_t(u)][size_t(w)] = 1;

  for (int k = 0; k < t.n; ++k)
    for (int i = 0; i < t.n; ++i) {
      if (!rel[size_t(i)][size_t(k)]) continue;
      for (int j = 0; j < t.n; ++j)
        if (rel[size_t(k)][size_t(j)]) rel[size_t(i)][size_t(j)] = 1;
    }
  for (int i = 0; i < t.n; ++i) {
    require(!rel[size_t(i)][size_t(i)], ErrKind::Internal, "precedence cycle");
    for (int j = i + 1; j < t.n; ++j)
      require(!(rel[size_t(i)][size_t(j)] && rel[size_t(j)][size_t(i)]), ErrKind::Internal,
              "precedence not antisymmetric");
  }
  p.pred.assign(size_t(t.n), {});
  for (int v = 0; v < t.n; ++v)
    for (int u = 0; u < t.n; ++u)
      if (rel[size_t(u)][size_t(v)]) p.pred[size_t(v)].push_back(u);
  return p;
}

LinExList linear_extensions(const PrecedencePoset& p, uint64_t limit) {
  require(limit >= 1, ErrKind::User, "extension limit must be at least 1");
  LinExList out;
  enumerate_extensions(p, [&](const VariableOrdering& o) {
    if (uint64_t(out.orders.size()) == limit) {
      out.truncated = true;
      return false;
    }
    out.orders.push_back(o);
    return true;
  });
  return out;
}

bool is_cw_equivalent(const Query& q, const VariableOrdering& sigma, const VariableOrdering& pi) {
  Regime regime = detect_regime(q);
  if (!free_first_perm(q.shape, sigma) || !free_first_perm(q.shape, pi)) return false;
  if (sigma == pi) return true;
  if (regime == Regime::IdempotentProduct) {
    VertexSet unc = unclosed_set(q);
    if (!respects_escape_zone(q, unc, sigma) || !respects_escape_zone(q, unc, pi)) return false;
  }
  std::vector<Vertex> u(sigma.begin() + q.shape.f, sigma.end());
  std::vector<Vertex> v(pi.begin() + q.shape.f, pi.end());
  return cw_rec(q.shape, u, v, bound_edges(q, regime), q.n() + 1);
}

bool evo_contains(const Query& q, const VariableOrdering& sigma) {
  Regime regime = detect_regime(q);
  if (!free_first_perm(q.shape, sigma)) return false;
  if (regime == Regime::IdempotentProduct &&
      !respects_escape_zone(q, unclosed_set(q), sigma))
    return false;
  std::vector<Vertex> u(sigma.begin() + q.shape.f, sigma.end());
  return greedy_rec(q.shape, u, bound_edges(q, regime), q.n() + 1);
}

FaqwExactQuery faqw_exact_query(const Query& q, uint64_t limit) {
  require(limit >= 1, ErrKind::User, "extension limit must be at least 1");
  PrecedencePoset p = precedence_poset(expression_tree(q));
  FaqwExactQuery res;
  bool have = false;
  uint64_t count = 0;
  enumerate_extensions(p, [&](const VariableOrdering& o) {
    if (count == limit) {
      res.truncated = true;
      return false;
    }
    ++count;
    Rat w = faqw_of_ordering(q.shape, o);
    if (!have || w < res.value) {
      res.value = w;
      res.order = o;
      have = true;
    }
    return true;
  });
  require(have, ErrKind::Internal, "no linear extension found");
  return res;
}

NodeHypergraphResult node_hypergraph(const Query& q, const ExpressionTree& t, int node_id) {
  require(node_id >= 0 && node_id < int(t.nodes.size()), ErrKind::User, "no such tree node");
  const TreeNode& L = t.nodes[size_t(node_id)];
  auto counted = [&](int id) { return t.nodes[size_t(id)].tag != int(OpId::Prod); };
  std::function<void(int, std::vector<int>&)> collect = [&](int id, std::vector<int>& out) {
    out.push_back(id);
    for (int c : t.nodes[size_t(id)].children) collect(c, out);
  };
  // Union of the original edges touching some counted node in subtree(id).
  auto edge_union_below = [&](int id) {
    std::vector<int> subs;
    collect(id, subs);
    VertexSet counted_vars;
    for (int s : subs)
      if (counted(s)) counted_vars = vs_union(counted_vars, t.nodes[size_t(s)].vars);
    VertexSet un;
    for (const auto& e : q.shape.h.edges)
      if (vs_intersects(e.vars, counted_vars)) un = vs_union(un, e.vars);
    return un;
  };
  auto ancestors_meet = [&](int from, const VertexSet& set) {
    VertexSet out;
    for (int a = from; a != -1; a = t.nodes[size_t(a)].parent)
      out = vs_union(out, vs_intersect(t.nodes[size_t(a)].vars, set));
    return out;
  };

  NodeHypergraphResult res;
  res.vars.assign(L.vars.begin(), L.vars.end());
  res.u_of_node = ancestors_meet(L.parent, edge_union_below(node_id));

  VertexSet desc_counted;
  {
    std::vector<int> subs;
    collect(node_id, subs);
    for (int s : subs)
      if (s != node_id && counted(s)) desc_counted = vs_union(desc_counted, t.nodes[size_t(s)].vars);
  }
  std::vector<std::pair<VertexSet, std::string>> hedges;
  for (const auto& e : q.shape.h.edges) {
    if (!vs_intersects(e.vars, L.vars)) continue;
    if (vs_intersects(e.vars, desc_counted)) continue;
    hedges.push_back({vs_intersect(e.vars, L.vars), e.name});
  }
  for (int c : L.children) {
    VertexSet eu = edge_union_below(c);
    NodeChildInfo info;
    info.child = c;
    info.s = vs_intersect(L.vars, eu);
    info.u = ancestors_meet(node_id, eu);
    if (!info.s.empty()) hedges.push_back({info.s, "c" + std::to_string(c)});
    res.children.push_back(std::move(info));
  }

  std::vector<VertexSet> local;
  for (const auto& [s, name] : hedges) {
    VertexSet ls;
    for (Vertex x : s)
      ls.push_back(int(std::lower_bound(L.vars.begin(), L.vars.end(), x) - L.vars.begin()));
    local.push_back(ls);
  }
  res.h = Hypergraph::make(int(L.vars.size()), local);
  for (size_t i = 0; i < hedges.size(); ++i) res.h.edges[i].name = hedges[i].second;
  return res;
}

ApproxResult faqw_approx(const Query& q, FhtwOracle oracle) {
  ExpressionTree t = expression_tree(q);
  PrecedencePoset p = precedence_poset(t);

  std::map<int, VariableOrdering> local_order;
  for (size_t id = 0; id < t.nodes.size(); ++id) {
    const TreeNode& nd = t.nodes[id];
    if (nd.tag == int(OpId::Prod) || nd.vars.empty()) continue;
    NodeHypergraphResult nh = node_hypergraph(q, t, int(id));
    VertexSet covered;  // local ids in at least one edge
    for (const auto& e : nh.h.edges) covered = vs_union(covered, e.vars);
    VariableOrdering ord;
    if (!covered.empty()) {
      std::vector<VertexSet> sub;
      for (const auto& e : nh.h.edges) {
        VertexSet ls;
        for (Vertex x : e.vars)
          ls.push_back(int(std::lower_bound(covered.begin(), covered.end(), x) - covered.begin()));
        sub.push_back(ls);
      }
      Hypergraph hh = Hypergraph::make(int(covered.size()), sub);
      FhtwResult fr = oracle == FhtwOracle::Exact ? fhtw_exact(hh) : fhtw_greedy(hh);
      for (Vertex lx : fr.ordering) ord.push_back(nh.vars[size_t(covered[size_t(lx)])]);
    }
    for (size_t li = 0; li < nh.vars.size(); ++li)
      if (!vs_contains(covered, int(li))) ord.push_back(nh.vars[li]);
    local_order[int(id)] = std::move(ord);
  }

  struct Element {
    int node = -1;       // counted node id, or -1 for a single product variable
    VertexSet vars;
  };
  std::vector<Element> elems;
  for (size_t id = 0; id < t.nodes.size(); ++id) {
    const TreeNode& nd = t.nodes[id];
    if (nd.tag == int(OpId::Prod) || nd.vars.empty()) continue;
    elems.push_back({int(id), nd.vars});
  }
  for (Vertex w : t.product_vars()) elems.push_back({-1, {w}});

  int m = int(elems.size());
  std::vector<std::vector<char>> before(size_t(m), std::vector<char>(size_t(m), 0));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      for (Vertex x : elems[size_t(i)].vars)
        for (Vertex y : elems[size_t(j)].vars)
          if (p.precedes(x, y)) before[size_t(i)][size_t(j)] = 1;
    }

  std::vector<char> done(size_t(m), 0);
  VariableOrdering sigma;
  for (int step = 0; step < m; ++step) {
    int pick = -1;
    for (int i = 0; i < m; ++i) {
      if (done[size_t(i)]) continue;
      bool ready = true;
      for (int j = 0; j < m; ++j)
        if (!done[size_t(j)] && before[size_t(j)][size_t(i)]) ready = false;
      if (!ready) continue;
      if (pick == -1 || elems[size_t(i)].vars[0] < elems[size_t(pick)].vars[0]) pick = i;
    }
    require(pick != -1, ErrKind::Internal, "block order has a cycle");
    done[size_t(pick)] = 1;
    if (elems[size_t(pick)].node >= 0)
      for (Vertex x : local_order[elems[size_t(pick)].node]) sigma.push_back(x);
    else
      sigma.push_back(elems[size_t(pick)].vars[0]);
  }

  ApproxResult res;
  res.order = std::move(sigma);
  res.achieved = faqw_of_ordering(q.shape, res.order);
  return res;
}

}  // namespace faq
