#include "faq/width.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>

#include "faq/error.hpp"
#include "faq/lp.hpp"

namespace faq {

void QueryShape::validate() const {
  h.validate();
  require(f >= 0 && f <= h.n, ErrKind::User,
          "free variable count out of range");
  require(int(agg.size()) == h.n, ErrKind::User,
          "aggregate list must have one entry per variable");
}

VertexSet QueryShape::product_vars() const {
  VertexSet r;
  for (Vertex v = f; v < h.n; ++v)
    if (agg[v] == OpId::Prod) r.push_back(v);
  return r;
}

VertexSet QueryShape::k_set() const {
  VertexSet r;
  for (Vertex v = 0; v < h.n; ++v)
    if (in_k_set(v)) r.push_back(v);
  return r;
}

CoverSolution fractional_cover_number(const Hypergraph& h,
                                      const VertexSet& b) {
  for (Vertex v : b)
    require(h.has_vertex_in_some_edge(v), ErrKind::Structural,
            "vertex " + std::to_string(v) +
                " lies in no edge; cover is infeasible");
  CoverSolution sol;
  sol.objective = 0;
  if (b.empty()) return sol;

  size_t m = h.edges.size();
  std::vector<std::vector<Rat>> a(m, std::vector<Rat>(b.size(), Rat(0)));
  std::vector<Rat> rhs(m, Rat(1)), c(b.size(), Rat(1));
  for (size_t i = 0; i < m; ++i)
    for (size_t j = 0; j < b.size(); ++j)
      if (vs_contains(h.edges[i].vars, b[j])) a[i][j] = 1;
  auto r = packing_lp_exact(a, rhs, c);
  require(!r.unbounded, ErrKind::Internal,
          "cover LP unbounded despite coverage pre-check");
  sol.objective = r.objective;
  for (size_t i = 0; i < m; ++i)
    if (r.dual[i] != 0) sol.weights[h.edges[i].id] = r.dual[i];
  return sol;
}

int integral_cover_number(const Hypergraph& h, const VertexSet& b) {
  for (Vertex v : b)
    require(h.has_vertex_in_some_edge(v), ErrKind::Structural,
            "vertex " + std::to_string(v) +
                " lies in no edge; cover is infeasible");
  require(h.edges.size() <= 20, ErrKind::SizeCap,
          "integral cover search caps at 20 edges");
  int best = int(h.edges.size()) + 1;
  std::function<void(const VertexSet&, int)> rec = [&](const VertexSet& rest,
                                                       int used) {
    if (used >= best) return;
    if (rest.empty()) {
      best = used;
      return;
    }
    Vertex v = rest[0];
    for (const auto& e : h.edges)
      if (vs_contains(e.vars, v)) rec(vs_minus(rest, e.vars), used + 1);
  };
  rec(b, 0);
  return best;
}

namespace {

// best rational approximation by continued fractions; the LP vertices have
// small denominators, so this recovers them exactly from doubles
Rat rat_from_double(double x, long max_den = 1000000) {
  if (!(x > 0)) return Rat(0);
  long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double val = x;
  for (int it = 0; it < 40; ++it) {
    double fl = std::floor(val);
    if (fl > 4e18) break;
    long a = (long)fl;
    long p2 = a * p1 + p0, q2 = a * q1 + q0;
    if (q2 > max_den || q2 <= 0 || p2 < 0) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    double approx = double(p2) / double(q2);
    if (std::abs(approx - x) <= 1e-12 * std::max(1.0, std::abs(x))) break;
    double frac = val - fl;
    if (frac < 1e-15) break;
    val = 1.0 / frac;
  }
  if (q1 == 0) return Rat(0);
  Rat r(p1, q1);
  r.canonicalize();
  return r;
}

}  // namespace

AgmResult agm_bound(const Hypergraph& h, const VertexSet& b,
                    const std::map<int, long long>& sizes) {
  for (const auto& e : h.edges) {
    auto it = sizes.find(e.id);
    require(it != sizes.end(), ErrKind::User,
            "missing size for edge " + e.name);
    require(it->second >= 1, ErrKind::User,
            "size of edge " + e.name + " must be at least 1");
  }
  for (Vertex v : b)
    require(h.has_vertex_in_some_edge(v), ErrKind::Structural,
            "vertex " + std::to_string(v) +
                " lies in no edge; cover is infeasible");
  AgmResult res;
  res.cover.objective = 0;
  if (b.empty()) {
    res.bound = 1.0;
    res.log2_bound = 0.0;
    return res;
  }

  size_t m = h.edges.size();
  std::vector<std::vector<double>> a(m, std::vector<double>(b.size(), 0.0));
  std::vector<double> rhs(m), c(b.size(), 1.0);
  for (size_t i = 0; i < m; ++i) {
    rhs[i] = std::log2(double(sizes.at(h.edges[i].id)));
    for (size_t j = 0; j < b.size(); ++j)
      if (vs_contains(h.edges[i].vars, b[j])) a[i][j] = 1.0;
  }
  auto r = packing_lp_double(a, rhs, c);
  require(!r.unbounded, ErrKind::Internal,
          "log-weighted LP unbounded despite coverage pre-check");

  std::vector<Rat> lam(m, Rat(0));
  for (size_t i = 0; i < m; ++i)
    if (r.dual[i] > 0) lam[i] = rat_from_double(r.dual[i]);

  // repair to exact feasibility: scale by the worst coverage
  Rat gamma;
  bool have_gamma = false;
  for (Vertex v : b) {
    Rat cov(0);
    for (size_t i = 0; i < m; ++i)
      if (vs_contains(h.edges[i].vars, v)) cov += lam[i];
    if (!have_gamma || cov < gamma) {
      gamma = cov;
      have_gamma = true;
    }
  }
  if (!have_gamma || gamma <= 0) {
    // degenerate; fall back to the uniform cover on edges meeting b
    for (size_t i = 0; i < m; ++i)
      lam[i] = vs_intersects(h.edges[i].vars, b) ? Rat(1) : Rat(0);
  } else if (gamma < 1) {
    for (auto& x : lam) x /= gamma;
  }

  Rat total(0);
  double log2_bound = 0.0;
  for (size_t i = 0; i < m; ++i) {
    if (lam[i] == 0) continue;
    res.cover.weights[h.edges[i].id] = lam[i];
    total += lam[i];
    log2_bound +=
        lam[i].get_d() * std::log2(double(sizes.at(h.edges[i].id)));
  }
  res.cover.objective = total;
  res.log2_bound = log2_bound;
  res.bound = std::exp2(log2_bound);
  return res;
}

ExtRat induced_g_width(const Hypergraph& h, const VariableOrdering& sigma,
                       GWidthKind g) {
  auto seq = elimination_sequence(h, sigma);
  ExtRat best;
  bool first = true;
  for (const auto& step : seq.steps) {
    ExtRat val;
    if (g == GWidthKind::CardMinusOne) {
      val.v = Rat(long(step.u.size())) - 1;
    } else if (!step.u.empty()) {
      try {
        val.v = g == GWidthKind::Integral
                    ? Rat(integral_cover_number(h, step.u))
                    : fractional_cover_number(h, step.u).objective;
      } catch (const Error& e) {
        if (e.kind() != ErrKind::Structural) throw;
        val = ExtRat::infinity();
      }
    }
    best = first ? val : ext_max(best, val);
    first = false;
  }
  return best;
}

Rat faqw_of_ordering(const QueryShape& q, const VariableOrdering& sigma) {
  q.validate();
  auto seq = elimination_sequence(q.h, sigma, q.product_vars());
  Rat best(0);
  for (const auto& step : seq.steps) {
    if (!q.in_k_set(step.v) || step.u.empty()) continue;
    Rat r = fractional_cover_number(q.h, step.u).objective;
    if (r > best) best = r;
  }
  return best;
}

TdReport validate_td(const Hypergraph& h, const TreeDecomposition& td) {
  int nn = int(td.bags.size());
  if (nn == 0)
    return {h.n == 0 && h.edges.empty(), "decomposition has no nodes"};
  for (const auto& [a, b] : td.tree_edges)
    if (a < 0 || a >= nn || b < 0 || b >= nn || a == b)
      return {false, "tree edge references a missing node"};
  if (int(td.tree_edges.size()) != nn - 1)
    return {false, "decomposition graph is not a tree"};
  std::vector<std::vector<int>> adj(nn);
  for (const auto& [a, b] : td.tree_edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<char> seen(nn, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    int x = stack.back();
    stack.pop_back();
    for (int y : adj[x])
      if (!seen[y]) {
        seen[y] = 1;
        stack.push_back(y);
      }
  }
  for (int i = 0; i < nn; ++i)
    if (!seen[i]) return {false, "decomposition graph is not a tree"};

  for (const auto& e : h.edges) {
    bool covered = false;
    for (const auto& bag : td.bags)
      if (vs_subset(e.vars, bag)) covered = true;
    if (!covered)
      return {false, "edge " + e.name + " fits inside no bag"};
  }
  for (Vertex v = 0; v < h.n; ++v) {
    std::vector<char> occ(nn, 0);
    int start = -1, count = 0;
    for (int i = 0; i < nn; ++i)
      if (vs_contains(td.bags[i], v)) {
        occ[i] = 1;
        start = i;
        ++count;
      }
    if (count == 0)
      return {false, "vertex " + std::to_string(v) + " appears in no bag"};
    std::vector<char> vis(nn, 0);
    std::vector<int> st{start};
    vis[start] = 1;
    int reached = 1;
    while (!st.empty()) {
      int x = st.back();
      st.pop_back();
      for (int y : adj[x])
        if (occ[y] && !vis[y]) {
          vis[y] = 1;
          ++reached;
          st.push_back(y);
        }
    }
    if (reached != count)
      return {false, "occurrences of vertex " + std::to_string(v) +
                         " are disconnected"};
  }
  return {true, ""};
}

TreeDecomposition reduce_td(const TreeDecomposition& td) {
  int nn = int(td.bags.size());
  std::vector<VertexSet> bags = td.bags;
  std::vector<std::set<int>> adj(nn);
  for (const auto& [a, b] : td.tree_edges) {
    adj[a].insert(b);
    adj[b].insert(a);
  }
  std::vector<char> alive(nn, 1);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int a = 0; a < nn && !changed; ++a) {
      if (!alive[a]) continue;
      for (int b : adj[a]) {
        if (vs_subset(bags[a], bags[b])) {
          // merge a into b
          for (int c : adj[a]) {
            if (c == b) continue;
            adj[c].erase(a);
            adj[c].insert(b);
            adj[b].insert(c);
          }
          adj[b].erase(a);
          adj[a].clear();
          alive[a] = 0;
          changed = true;
          break;
        }
      }
    }
  }
  std::vector<int> remap(nn, -1);
  TreeDecomposition out;
  for (int i = 0; i < nn; ++i)
    if (alive[i]) {
      remap[i] = int(out.bags.size());
      out.bags.push_back(bags[i]);
    }
  for (int a = 0; a < nn; ++a) {
    if (!alive[a]) continue;
    for (int b : adj[a])
      if (a < b) out.tree_edges.emplace_back(remap[a], remap[b]);
  }
  return out;
}

TreeDecomposition td_from_ordering(const Hypergraph& h,
                                   const VariableOrdering& sigma) {
  auto seq = elimination_sequence(h, sigma);
  int n = h.n;
  TreeDecomposition td;
  if (n == 0) return td;
  std::vector<int> pos(n);
  for (int p = 0; p < n; ++p) pos[sigma[p]] = p;
  td.bags.resize(n);
  for (const auto& step : seq.steps) {
    int p = step.k - 1;
    td.bags[p] = step.u.empty() ? VertexSet{step.v} : step.u;
    VertexSet rest = vs_remove(step.u, step.v);
    if (!rest.empty()) {
      int parent = -1;
      for (Vertex u : rest) parent = std::max(parent, pos[u]);
      td.tree_edges.emplace_back(p, parent);
    } else if (p >= 1) {
      td.tree_edges.emplace_back(p, p - 1);
    }
  }
  return reduce_td(td);
}

VariableOrdering ordering_from_td(const Hypergraph& h,
                                  const TreeDecomposition& td0) {
  auto rep = validate_td(h, td0);
  require(rep.valid, ErrKind::User,
          "invalid tree decomposition: " + rep.violation);
  auto td = reduce_td(td0);
  int nn = int(td.bags.size());
  std::vector<std::set<int>> adj(nn);
  for (const auto& [a, b] : td.tree_edges) {
    adj[a].insert(b);
    adj[b].insert(a);
  }
  std::vector<char> alive(nn, 1), emitted(h.n, 0);
  std::vector<Vertex> emission;
  auto emit = [&](const VertexSet& vs, const VertexSet& except) {
    for (Vertex v : vs)
      if (!vs_contains(except, v) && !emitted[v]) {
        emitted[v] = 1;
        emission.push_back(v);
      }
  };
  // rooted at node 0: peel the smallest-id non-root leaf each round
  int remaining = nn;
  while (remaining > 1) {
    int leaf = -1;
    for (int i = 1; i < nn && leaf < 0; ++i)
      if (alive[i] && adj[i].size() == 1) leaf = i;
    require(leaf >= 0, ErrKind::Internal, "leafless tree while peeling");
    int parent = *adj[leaf].begin();
    emit(td.bags[leaf], td.bags[parent]);
    adj[parent].erase(leaf);
    adj[leaf].clear();
    alive[leaf] = 0;
    --remaining;
  }
  for (int i = 0; i < nn; ++i)
    if (alive[i]) emit(td.bags[i], {});
  return VariableOrdering(emission.rbegin(), emission.rend());
}

namespace {

using Mask = uint64_t;

struct ElimContext {
  const Hypergraph& h;
  std::vector<Mask> adj;
  std::vector<char> has_edge;
  std::map<Mask, Rat> rho_cache;

  explicit ElimContext(const Hypergraph& hh) : h(hh) {
    adj.assign(h.n, 0);
    has_edge.assign(h.n, 0);
    for (const auto& e : h.edges) {
      Mask m = 0;
      for (Vertex v : e.vars) m |= Mask(1) << v;
      for (Vertex v : e.vars) {
        has_edge[v] = 1;
        adj[v] |= m & ~(Mask(1) << v);
      }
    }
  }

  // the union of boundary edges when v is eliminated after the set t,
  // via reachability through t in the primal graph
  Mask u_of(int v, Mask t) const {
    if (!has_edge[v]) return 0;
    Mask acc = adj[v];
    Mask through = 0;
    Mask frontier = adj[v] & t;
    while (frontier) {
      through |= frontier;
      Mask next = 0;
      Mask f = frontier;
      while (f) {
        int u = __builtin_ctzll(f);
        f &= f - 1;
        next |= adj[u];
      }
      acc |= next;
      frontier = next & t & ~through;
    }
    return (acc & ~t) | (Mask(1) << v);
  }

  Rat rho(Mask u) {
    if (!u) return Rat(0);
    auto it = rho_cache.find(u);
    if (it != rho_cache.end()) return it->second;
    VertexSet b;
    Mask m = u;
    while (m) {
      b.push_back(__builtin_ctzll(m));
      m &= m - 1;
    }
    Rat r = fractional_cover_number(h, b).objective;
    rho_cache.emplace(u, r);
    return r;
  }
};

}  // namespace

FhtwResult fhtw_exact(const Hypergraph& h, int n_cap) {
  h.validate();
  require(h.n <= n_cap, ErrKind::SizeCap,
          "exact width search caps at " + std::to_string(n_cap) +
              " vertices; use the greedy variant");
  int n = h.n;
  FhtwResult res;
  res.value = 0;
  if (n == 0) return res;

  ElimContext ctx(h);
  size_t full = size_t(1) << n;
  std::vector<Rat> cost(full, Rat(0));
  std::vector<int8_t> choice(full, -1);
  for (size_t t = full - 1; t + 1 > 0; --t) {
    if (t == full - 1) continue;  // everything eliminated: cost 0
    bool first = true;
    Rat best;
    int who = -1;
    for (int v = 0; v < n; ++v) {
      if (t & (Mask(1) << v)) continue;
      Rat step = ctx.rho(ctx.u_of(v, Mask(t)));
      Rat rest = cost[t | (size_t(1) << v)];
      Rat val = step > rest ? step : rest;
      if (first || val < best) {
        best = val;
        who = v;
        first = false;
      }
    }
    cost[t] = best;
    choice[t] = int8_t(who);
    if (t == 0) break;
  }

  std::vector<Vertex> elim;
  size_t t = 0;
  for (int i = 0; i < n; ++i) {
    int v = choice[t];
    elim.push_back(v);
    t |= size_t(1) << v;
  }
  res.ordering.assign(elim.rbegin(), elim.rend());
  res.value = cost[0];
  res.td = td_from_ordering(h, res.ordering);
  return res;
}

FhtwResult fhtw_greedy(const Hypergraph& h) {
  h.validate();
  require(h.n <= 63, ErrKind::SizeCap, "greedy width caps at 63 vertices");
  int n = h.n;
  FhtwResult res;
  res.value = 0;
  if (n == 0) return res;

  ElimContext ctx(h);
  Mask t = 0;
  std::vector<Vertex> elim;
  Rat worst(0);
  for (int step = 0; step < n; ++step) {
    int who = -1;
    Rat best;
    bool first = true;
    for (int v = 0; v < n; ++v) {
      if (t & (Mask(1) << v)) continue;
      Rat r = ctx.rho(ctx.u_of(v, t));
      if (first || r < best) {
        best = r;
        who = v;
        first = false;
      }
    }
    elim.push_back(who);
    t |= Mask(1) << who;
    if (best > worst) worst = best;
  }
  res.ordering.assign(elim.rbegin(), elim.rend());
  res.value = worst;
  res.td = td_from_ordering(h, res.ordering);
  return res;
}

int l_star_size(const Hypergraph& h, const VertexSet& l) {
  auto comps = connected_components(h, l);
  int best = 0;
  for (const auto& c : comps) {
    VertexSet touched;
    std::vector<const Edge*> ebar;
    for (const auto& e : h.edges)
      if (vs_intersects(e.vars, c)) {
        ebar.push_back(&e);
        touched = vs_union(touched, e.vars);
      }
    VertexSet u = vs_intersect(touched, l);
    require(u.size() <= 20, ErrKind::SizeCap,
            "independence search caps at 20 candidate vertices");
    int k = int(u.size());
    std::vector<uint32_t> conflict(k, 0);
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j)
        for (const Edge* e : ebar)
          if (vs_contains(e->vars, u[i]) && vs_contains(e->vars, u[j])) {
            conflict[i] |= 1u << j;
            conflict[j] |= 1u << i;
            break;
          }
    std::function<int(uint32_t)> mis = [&](uint32_t cand) -> int {
      if (!cand) return 0;
      int v = __builtin_ctz(cand);
      uint32_t without = cand & ~(1u << v);
      int skip = mis(without);
      int take = 1 + mis(without & ~conflict[v]);
      return std::max(skip, take);
    };
    best = std::max(best, mis(k == 32 ? ~0u : (1u << k) - 1));
  }
  return best;
}

ComposedWidthBound composed_width_bound(
    const Hypergraph& outer,
    const std::map<int, std::vector<VertexSet>>& family) {
  auto composed = compose(outer, family);  // validates the family
  auto outer_fhtw = fhtw_exact(outer);

  Rat max_rho(0);
  std::map<int, TreeDecomposition> inner_tds;  // bags in global vertex ids
  for (const auto& e : outer.edges) {
    std::vector<VertexSet> sets;
    for (const auto& s : family.at(e.id)) sets.push_back(vs_normalize(s));
    Hypergraph inner_global = Hypergraph::make(outer.n, sets);
    Rat r = fractional_cover_number(inner_global, e.vars).objective;
    if (r > max_rho) max_rho = r;

    // reindex onto e's vertices for the exact width search
    std::map<Vertex, int> to_small;
    for (size_t i = 0; i < e.vars.size(); ++i) to_small[e.vars[i]] = int(i);
    std::vector<VertexSet> small_sets;
    for (const auto& s : sets) {
      VertexSet t;
      for (Vertex v : s) t.push_back(to_small.at(v));
      small_sets.push_back(vs_normalize(t));
    }
    auto itd = fhtw_exact(Hypergraph::make(int(e.vars.size()), small_sets));
    TreeDecomposition global_td;
    for (const auto& bag : itd.td.bags) {
      VertexSet g;
      for (Vertex v : bag) g.push_back(e.vars[v]);
      global_td.bags.push_back(vs_normalize(g));
    }
    global_td.tree_edges = itd.td.tree_edges;
    inner_tds[e.id] = std::move(global_td);
  }

  // root-hanging: outer bags widened by the inner roots, inner trees hung
  TreeDecomposition big;
  int outer_nodes = int(outer_fhtw.td.bags.size());
  for (int i = 0; i < outer_nodes; ++i) big.bags.push_back({});
  for (const auto& [a, b] : outer_fhtw.td.tree_edges)
    big.tree_edges.emplace_back(a, b);
  for (int i = 0; i < outer_nodes; ++i) {
    VertexSet widened = outer_fhtw.td.bags[i];
    for (const auto& e : outer.edges) {
      if (!vs_intersects(e.vars, outer_fhtw.td.bags[i])) continue;
      const auto& itd = inner_tds.at(e.id);
      widened = vs_union(widened, itd.bags[0]);
      // hang a copy of the inner tree minus its root from this node
      std::vector<int> remap(itd.bags.size(), -1);
      remap[0] = i;
      for (size_t j = 1; j < itd.bags.size(); ++j) {
        remap[j] = int(big.bags.size());
        big.bags.push_back(itd.bags[j]);
      }
      for (const auto& [a, b] : itd.tree_edges)
        big.tree_edges.emplace_back(remap[a], remap[b]);
    }
    big.bags[i] = widened;
  }

  // patch-up: reconnect every vertex's occurrence set along tree paths
  int nn = int(big.bags.size());
  std::vector<std::vector<int>> adj(nn);
  for (const auto& [a, b] : big.tree_edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<int> parent(nn, -1), depth(nn, 0), order;
  std::vector<char> seen(nn, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    int x = stack.back();
    stack.pop_back();
    order.push_back(x);
    for (int y : adj[x])
      if (!seen[y]) {
        seen[y] = 1;
        parent[y] = x;
        depth[y] = depth[x] + 1;
        stack.push_back(y);
      }
  }
  for (Vertex v = 0; v < composed.n; ++v) {
    std::vector<int> occ;
    for (int i = 0; i < nn; ++i)
      if (vs_contains(big.bags[i], v)) occ.push_back(i);
    if (occ.empty()) continue;
    int anchor = occ[0];
    for (int node : occ) {
      int a = node, b = anchor;
      while (depth[a] > depth[b]) {
        big.bags[a] = vs_union(big.bags[a], {v});
        a = parent[a];
      }
      while (depth[b] > depth[a]) {
        big.bags[b] = vs_union(big.bags[b], {v});
        b = parent[b];
      }
      while (a != b) {
        big.bags[a] = vs_union(big.bags[a], {v});
        big.bags[b] = vs_union(big.bags[b], {v});
        a = parent[a];
        b = parent[b];
      }
      big.bags[a] = vs_union(big.bags[a], {v});
    }
  }

  ComposedWidthBound out;
  out.bound = outer_fhtw.value * max_rho;
  out.td = reduce_td(big);
  return out;
}

}  // namespace faq
