#include "faq/hypergraph.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>

#include "faq/error.hpp"

namespace faq {

Hypergraph Hypergraph::make(int n, const std::vector<VertexSet>& edge_sets) {
  Hypergraph h;
  h.n = n;
  for (size_t i = 0; i < edge_sets.size(); ++i) {
    Edge e;
    e.id = int(i);
    e.name = "e" + std::to_string(i);
    e.vars = vs_normalize(edge_sets[i]);
    h.edges.push_back(std::move(e));
  }
  h.validate();
  return h;
}

void Hypergraph::validate() const {
  require(n >= 0, ErrKind::User, "vertex count must be nonnegative");
  for (const auto& e : edges) {
    require(!e.vars.empty(), ErrKind::User,
            "edge " + e.name + " has no vertices");
    for (Vertex v : e.vars)
      require(v >= 0 && v < n, ErrKind::User,
              "edge " + e.name + " references vertex " + std::to_string(v) +
                  " outside 0.." + std::to_string(n - 1));
  }
}

std::vector<int> Hypergraph::incident(Vertex v) const {
  std::vector<int> r;
  for (size_t i = 0; i < edges.size(); ++i)
    if (vs_contains(edges[i].vars, v)) r.push_back(int(i));
  return r;
}

const Edge* Hypergraph::edge_by_id(int id) const {
  for (const auto& e : edges)
    if (e.id == id) return &e;
  return nullptr;
}

bool Hypergraph::has_vertex_in_some_edge(Vertex v) const {
  for (const auto& e : edges)
    if (vs_contains(e.vars, v)) return true;
  return false;
}

static void check_ordering(int n, const VariableOrdering& sigma) {
  require(int(sigma.size()) == n, ErrKind::User,
          "ordering must list every variable exactly once");
  std::vector<char> seen(n, 0);
  for (Vertex v : sigma) {
    require(v >= 0 && v < n, ErrKind::User,
            "ordering mentions unknown variable " + std::to_string(v));
    require(!seen[v], ErrKind::User,
            "ordering repeats variable " + std::to_string(v));
    seen[v] = 1;
  }
}

EliminationSequence elimination_sequence(const Hypergraph& h,
                                         const VariableOrdering& sigma,
                                         const VertexSet& product_vars) {
  check_ordering(h.n, sigma);
  for (Vertex v : product_vars)
    require(v >= 0 && v < h.n, ErrKind::User,
            "product set mentions unknown variable " + std::to_string(v));

  int fresh = 0;
  for (const auto& e : h.edges) fresh = std::max(fresh, e.id + 1);

  EliminationSequence seq;
  std::vector<Edge> cur = h.edges;
  for (int k = h.n; k >= 1; --k) {
    ElimStep step;
    step.k = k;
    step.v = sigma[k - 1];
    step.product = vs_contains(product_vars, step.v);
    step.edges = cur;
    VertexSet u;
    for (size_t i = 0; i < cur.size(); ++i)
      if (vs_contains(cur[i].vars, step.v)) {
        step.boundary.push_back(int(i));
        u = vs_union(u, cur[i].vars);
      }
    step.u = u;

    std::vector<Edge> next;
    if (step.product) {
      for (size_t i = 0; i < cur.size(); ++i) {
        Edge e = cur[i];
        if (vs_contains(e.vars, step.v)) {
          e.vars = vs_remove(e.vars, step.v);
          if (e.vars.empty()) continue;
        }
        next.push_back(std::move(e));
      }
    } else {
      for (size_t i = 0; i < cur.size(); ++i)
        if (!vs_contains(cur[i].vars, step.v)) next.push_back(cur[i]);
      VertexSet rest = vs_remove(u, step.v);
      if (!step.boundary.empty() && !rest.empty()) {
        Edge e;
        e.id = fresh++;
        e.name = "u" + std::to_string(step.v);
        e.vars = std::move(rest);
        next.push_back(std::move(e));
      }
    }
    cur = std::move(next);
    seq.steps.push_back(std::move(step));
  }
  return seq;
}

std::vector<VertexSet> connected_components(const Hypergraph& h,
                                            const VertexSet& removed) {
  std::vector<int> comp(h.n, -1);
  for (Vertex v : removed)
    if (v >= 0 && v < h.n) comp[v] = -2;

  // union-find over remaining vertices, merged along restricted edges
  std::vector<int> parent(h.n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : h.edges) {
    int first = -1;
    for (Vertex v : e.vars) {
      if (comp[v] == -2) continue;
      if (first < 0)
        first = v;
      else
        parent[find(v)] = find(first);
    }
  }
  std::map<int, VertexSet> groups;
  for (Vertex v = 0; v < h.n; ++v)
    if (comp[v] != -2) groups[find(v)].push_back(v);
  std::vector<VertexSet> r;
  for (auto& [root, vs] : groups) r.push_back(std::move(vs));
  std::sort(r.begin(), r.end(),
            [](const VertexSet& a, const VertexSet& b) { return a[0] < b[0]; });
  return r;
}

ExtendedComponents extended_components(const Hypergraph& h, const VertexSet& l,
                                       const VertexSet& w) {
  require(!vs_intersects(l, w), ErrKind::User,
          "block and product sets must be disjoint");
  ExtendedComponents out;
  auto cores = connected_components(h, vs_union(l, w));
  for (const auto& core : cores) {
    ExtendedComponent ec;
    VertexSet ext = core;
    for (const auto& e : h.edges)
      if (vs_intersects(e.vars, core))
        ext = vs_union(ext, vs_intersect(e.vars, w));
    ec.vars = std::move(ext);
    for (const auto& e : h.edges)
      if (vs_intersects(e.vars, core)) {
        Edge r = e;
        r.vars = vs_intersect(e.vars, ec.vars);
        ec.edges.push_back(std::move(r));
      }
    out.components.push_back(std::move(ec));
  }
  // product vertices never adjacent to a core dangle (isolated ones too)
  VertexSet attached;
  for (const auto& ec : out.components)
    attached = vs_union(attached, vs_intersect(ec.vars, w));
  out.dangling = vs_minus(w, attached);
  return out;
}

AcyclicityResult is_alpha_acyclic(const Hypergraph& h) {
  std::vector<Edge> cur = h.edges;
  std::vector<char> alive(h.n, 1);
  int fresh = 0;
  for (const auto& e : h.edges) fresh = std::max(fresh, e.id + 1);

  std::vector<Vertex> removal;
  for (int round = 0; round < h.n; ++round) {
    int pick = -1;
    VertexSet u;
    for (Vertex v = 0; v < h.n && pick < 0; ++v) {
      if (!alive[v]) continue;
      VertexSet uni;
      bool any = false;
      for (const auto& e : cur)
        if (vs_contains(e.vars, v)) {
          any = true;
          uni = vs_union(uni, e.vars);
        }
      if (!any) {
        pick = v;
        u.clear();
        break;
      }
      for (const auto& e : cur)
        if (vs_contains(e.vars, v) && e.vars == uni) {
          pick = v;
          u = uni;
          break;
        }
    }
    if (pick < 0) return {false, std::nullopt};
    alive[pick] = 0;
    removal.push_back(pick);
    std::vector<Edge> next;
    for (const auto& e : cur)
      if (!vs_contains(e.vars, pick)) next.push_back(e);
    VertexSet rest = vs_remove(u, pick);
    if (!u.empty() && !rest.empty()) {
      Edge e;
      e.id = fresh++;
      e.name = "u" + std::to_string(pick);
      e.vars = std::move(rest);
      next.push_back(std::move(e));
    }
    cur = std::move(next);
  }
  VariableOrdering sigma(removal.rbegin(), removal.rend());
  return {true, sigma};
}

AcyclicityResult is_beta_acyclic(const Hypergraph& h) {
  std::vector<Edge> cur = h.edges;
  std::vector<char> alive(h.n, 1);
  std::vector<Vertex> removal;
  for (int round = 0; round < h.n; ++round) {
    int pick = -1;
    for (Vertex v = 0; v < h.n && pick < 0; ++v) {
      if (!alive[v]) continue;
      std::vector<VertexSet> inc;
      for (const auto& e : cur)
        if (vs_contains(e.vars, v)) inc.push_back(e.vars);
      std::sort(inc.begin(), inc.end(),
                [](const VertexSet& a, const VertexSet& b) {
                  return a.size() < b.size();
                });
      bool chain = true;
      for (size_t i = 0; i + 1 < inc.size() && chain; ++i)
        chain = vs_subset(inc[i], inc[i + 1]);
      if (chain) pick = v;
    }
    if (pick < 0) return {false, std::nullopt};
    alive[pick] = 0;
    removal.push_back(pick);
    std::vector<Edge> next;
    for (const auto& e : cur) {
      Edge r = e;
      r.vars = vs_remove(r.vars, pick);
      if (!r.vars.empty()) next.push_back(std::move(r));
    }
    cur = std::move(next);
  }
  VariableOrdering sigma(removal.rbegin(), removal.rend());
  return {true, sigma};
}

Hypergraph compose(const Hypergraph& outer,
                   const std::map<int, std::vector<VertexSet>>& family) {
  std::vector<VertexSet> sets;
  for (const auto& e : outer.edges) {
    auto it = family.find(e.id);
    require(it != family.end(), ErrKind::User,
            "composition family missing edge " + e.name);
    VertexSet covered;
    for (const auto& s : it->second) {
      auto t = vs_normalize(s);
      require(vs_subset(t, e.vars), ErrKind::User,
              "composition family for edge " + e.name +
                  " leaves its vertex set");
      covered = vs_union(covered, t);
      sets.push_back(std::move(t));
    }
    require(covered == e.vars, ErrKind::User,
            "composition family for edge " + e.name +
                " must cover all its vertices");
  }
  std::vector<VertexSet> dedup;
  for (const auto& s : sets)
    if (std::find(dedup.begin(), dedup.end(), s) == dedup.end())
      dedup.push_back(s);
  return Hypergraph::make(outer.n, dedup);
}

Hypergraph parse_hypergraph(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Hypergraph h;
  bool have_n = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok) || tok[0] == '#') continue;
    auto where = " at line " + std::to_string(lineno);
    if (tok == "n") {
      require(!have_n, ErrKind::User, "duplicate vertex-count line" + where);
      long long n;
      require(bool(ls >> n) && n >= 0, ErrKind::User,
              "bad vertex count" + where);
      h.n = int(n);
      have_n = true;
    } else if (tok == "e") {
      require(have_n, ErrKind::User,
              "edge line before vertex count" + where);
      Edge e;
      e.id = int(h.edges.size());
      require(bool(ls >> e.name), ErrKind::User, "edge needs a name" + where);
      Vertex v;
      while (ls >> v) e.vars.push_back(v);
      require(!ls.fail() || ls.eof(), ErrKind::User,
              "bad vertex list" + where);
      require(!e.vars.empty(), ErrKind::User, "edge has no vertices" + where);
      e.vars = vs_normalize(e.vars);
      h.edges.push_back(std::move(e));
    } else {
      fail_user("unknown directive '" + tok + "'" + where);
    }
  }
  require(have_n, ErrKind::User, "hypergraph text must start with 'n <count>'");
  h.validate();
  return h;
}

std::string print_hypergraph(const Hypergraph& h) {
  std::ostringstream out;
  out << "n " << h.n << "\n";
  for (const auto& e : h.edges) {
    out << "e " << e.name;
    for (Vertex v : e.vars) out << " " << v;
    out << "\n";
  }
  return out.str();
}

}  // namespace faq
