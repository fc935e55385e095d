#pragma once

// Shared test plumbing: dense factor builders, query assembly, a literal
// nested-fold reference evaluator, and random query generators. Everything
// here is deliberately independent of the evaluation engine so it can serve
// as an oracle for it.

#include <algorithm>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "faq/query.hpp"

namespace faqtest {

using namespace faq;

inline SemiringValue natv(long x) {
  SemiringValue v;
  v.tag = Carrier::Nat;
  v.payload = Int(x);
  return v;
}

inline SemiringValue boolv(bool b) {
  SemiringValue v;
  v.tag = Carrier::Bool;
  v.payload = b;
  return v;
}

inline SemiringValue ratv(long num, long den = 1) {
  SemiringValue v;
  v.tag = Carrier::Rational;
  Rat r(num, den);
  r.canonicalize();
  v.payload = r;
  return v;
}

inline SemiringValue maxprodv(long num, long den = 1) {
  SemiringValue v;
  v.tag = Carrier::MaxProd;
  Rat r(num, den);
  r.canonicalize();
  v.payload = r;
  return v;
}

// Enumerates the full key grid of `edge` (mixed per-variable domain sizes),
// keeps the non-zero images of `fn`.
inline ListingFactor dense_factor(const SemiringSpec& spec, const VertexSet& edge,
                                  const std::vector<uint32_t>& doms,
                                  const std::function<SemiringValue(const Key&)>& fn) {
  std::vector<std::pair<Key, SemiringValue>> tuples;
  size_t total = 1;
  for (uint32_t d : doms) total *= d;
  for (size_t t = 0; t < total; ++t) {
    Key k(edge.size());
    size_t rem = t;
    for (int i = int(edge.size()) - 1; i >= 0; --i) {
      k[size_t(i)] = uint32_t(rem % doms[size_t(i)]);
      rem /= doms[size_t(i)];
    }
    SemiringValue v = fn(k);
    if (!spec.is_zero(v)) tuples.push_back({k, v});
  }
  std::vector<int> support(edge.begin(), edge.end());
  return ListingFactor::build(spec, support, tuples);
}

inline ListingFactor dense_factor(const SemiringSpec& spec, const VertexSet& edge, uint32_t dom,
                                  const std::function<SemiringValue(const Key&)>& fn) {
  return dense_factor(spec, edge, std::vector<uint32_t>(edge.size(), dom), fn);
}

inline ListingFactor all_ones(const SemiringSpec& spec, const VertexSet& edge, uint32_t dom) {
  return dense_factor(spec, edge, dom, [&](const Key&) { return spec.one(); });
}

inline Query make_query(const SemiringSpec& spec, int n, int f, std::vector<OpId> agg,
                        const std::vector<VertexSet>& edges, uint32_t dom = 2) {
  Query q;
  q.spec = spec;
  q.shape.h = Hypergraph::make(n, edges);
  q.shape.f = f;
  agg.resize(size_t(n), spec.primary_plus());
  q.shape.agg = agg;
  q.domains.assign(size_t(n), {});
  for (int v = 0; v < n; ++v)
    for (uint32_t x = 0; x < dom; ++x) q.domains[size_t(v)].push_back(std::to_string(x));
  for (const auto& e : q.shape.h.edges) q.factors.push_back(all_ones(spec, e.vars, dom));
  q.validate();
  return q;
}

inline void set_factor(Query& q, size_t e, const std::function<SemiringValue(const Key&)>& fn) {
  const VertexSet& vars = q.shape.h.edges[e].vars;
  std::vector<uint32_t> doms;
  for (Vertex v : vars) doms.push_back(q.domain_size(v));
  q.factors[e] = dense_factor(q.spec, vars, doms, fn);
}

// Literal nested-fold evaluation of the reordered expression: aggregates
// applied in sigma order, innermost = sigma.back(). One output value per
// free tuple, enumerated canonically by ascending variable id, so results
// from different free orders align.
inline SemiringValue fold_bound(const Query& q, const VariableOrdering& order, size_t pos,
                                std::vector<uint32_t>& asg) {
  if (pos == order.size()) {
    SemiringValue v = q.spec.one();
    for (const auto& fac : q.factors) {
      Key k;
      k.reserve(fac.support.size());
      for (int var : fac.support) k.push_back(asg[size_t(var)]);
      v = q.spec.times(v, fac.value_at(k));
    }
    return v;
  }
  Vertex var = order[pos];
  OpId op = q.shape.agg[size_t(var)];
  SemiringValue acc = q.spec.zero();
  bool first = true;
  for (uint32_t x = 0; x < q.domain_size(var); ++x) {
    asg[size_t(var)] = x;
    SemiringValue term = fold_bound(q, order, pos + 1, asg);
    if (first) {
      acc = term;
      first = false;
    } else if (op == OpId::Prod) {
      acc = q.spec.times(acc, term);
    } else {
      acc = q.spec.plus(op, acc, term);
    }
  }
  return acc;
}

inline std::vector<SemiringValue> eval_folds(const Query& q, const VariableOrdering& sigma) {
  int f = q.shape.f;
  VariableOrdering bound(sigma.begin() + f, sigma.end());
  std::vector<uint32_t> asg(size_t(q.n()), 0);
  std::vector<SemiringValue> out;
  std::function<void(int)> rec = [&](int v) {
    if (v == f) {
      out.push_back(fold_bound(q, bound, 0, asg));
      return;
    }
    for (uint32_t x = 0; x < q.domain_size(v); ++x) {
      asg[size_t(v)] = x;
      rec(v + 1);
    }
  };
  rec(0);
  return out;
}

inline bool folds_equal(const Query& q, const std::vector<SemiringValue>& a,
                        const std::vector<SemiringValue>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!q.spec.equal(a[i], b[i])) return false;
  return true;
}

inline bool same_as_written(const Query& q, const VariableOrdering& sigma) {
  VariableOrdering id(static_cast<size_t>(q.n()));
  for (int i = 0; i < q.n(); ++i) id[size_t(i)] = i;
  return folds_equal(q, eval_folds(q, sigma), eval_folds(q, id));
}

// Checks a listing factor (zeros dropped, arbitrary key order) against the
// canonical free-tuple value vector produced by eval_folds.
inline bool factor_matches_folds(const Query& q, const ListingFactor& out,
                                 const std::vector<SemiringValue>& folds) {
  std::vector<int> frees;
  for (int v = 0; v < q.shape.f; ++v) frees.push_back(v);
  if (out.support != frees) return false;
  size_t nonzero = 0;
  std::vector<uint32_t> asg(size_t(std::max(q.shape.f, 1)), 0);
  size_t idx = 0;
  bool ok = true;
  std::function<void(int)> rec = [&](int v) {
    if (!ok) return;
    if (v == q.shape.f) {
      Key k(asg.begin(), asg.begin() + q.shape.f);
      SemiringValue got = out.value_at(k);
      if (!q.spec.equal(got, folds[idx])) ok = false;
      if (!q.spec.is_zero(folds[idx])) ++nonzero;
      ++idx;
      return;
    }
    for (uint32_t x = 0; x < q.domain_size(v); ++x) {
      asg[size_t(v)] = x;
      rec(v + 1);
    }
  };
  rec(0);
  return ok && nonzero == out.size();
}

inline std::vector<VariableOrdering> free_first_perms(int n, int f) {
  VariableOrdering p(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) p[size_t(i)] = i;
  std::vector<VariableOrdering> out;
  do {
    bool ok = true;
    for (int i = 0; i < f; ++i)
      if (p[size_t(i)] >= f) ok = false;
    if (ok) out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

inline Query random_query(std::mt19937& rng, bool products, bool di_values, int n_max = 5) {
  int n = 2 + int(rng() % uint32_t(n_max - 1));
  std::vector<OpId> agg(size_t(n), OpId::Sum);
  int semis = 0;
  for (int v = 0; v < n; ++v) {
    switch (rng() % (products ? 3u : 2u)) {
      case 0: agg[size_t(v)] = OpId::Sum; ++semis; break;
      case 1: agg[size_t(v)] = OpId::Max; ++semis; break;
      default: agg[size_t(v)] = OpId::Prod; break;
    }
  }
  if (semis == 0) agg[rng() % uint32_t(n)] = OpId::Sum;
  int m = 1 + int(rng() % uint32_t(n + 1));
  std::vector<VertexSet> edges;
  for (int e = 0; e < m; ++e) {
    VertexSet s;
    int sz = 1 + int(rng() % uint32_t(std::min(3, n)));
    while (int(s.size()) < sz) s = vs_union(s, {Vertex(rng() % uint32_t(n))});
    edges.push_back(s);
  }
  uint32_t dom = 2 + rng() % 2;
  Query q = make_query(SemiringSpec::named("nat"), n, 0, agg, edges, dom);
  for (size_t e = 0; e < q.factors.size(); ++e)
    set_factor(q, e, [&](const Key&) {
      if (di_values) return rng() % 4u == 0 ? natv(0) : natv(1);
      return natv(long(rng() % 4u));
    });
  return q;
}

// Aggregate shapes of the randomized evaluation suites: one semiring op
// throughout; two distinct op blocks; arbitrary semiring mixes; product
// aggregates inside the idempotent value regime; products with arbitrary
// values.
enum class AggPattern { SingleSemiring, TwoBlock, MixedSemiring, IdemProduct, GeneralProduct };

struct RandomQueryOpts {
  AggPattern pattern = AggPattern::MixedSemiring;
  std::string carrier = "nat";
  int n_max = 5;      // n drawn from [2, n_max]
  int f_max = 0;      // free prefix drawn from [0, min(f_max, n)]
  uint32_t dom_max = 3;
  int m_max = 5;
};

inline SemiringValue random_value(std::mt19937& rng, const SemiringSpec& spec, bool di_only) {
  switch (spec.carrier) {
    case Carrier::Bool:
      return boolv(rng() % 4u != 0);
    case Carrier::Nat:
      if (di_only) return rng() % 4u == 0 ? natv(0) : natv(1);
      return natv(long(rng() % 4u));
    case Carrier::Rational:
      if (di_only) return rng() % 4u == 0 ? ratv(0) : ratv(1);
      return ratv(long(rng() % 7u), 1 + long(rng() % 3u));
    case Carrier::MaxProd:
      if (di_only) return rng() % 4u == 0 ? maxprodv(0) : maxprodv(1);
      return maxprodv(long(rng() % 7u), 1 + long(rng() % 3u));
    default:
      break;
  }
  return di_only && rng() % 4u == 0 ? spec.zero() : spec.one();
}

inline Query random_pattern_query(std::mt19937& rng, const RandomQueryOpts& opts) {
  SemiringSpec spec = SemiringSpec::named(opts.carrier);
  int n = 2 + int(rng() % uint32_t(std::max(1, opts.n_max - 1)));
  int f = int(rng() % uint32_t(std::min(opts.f_max, n) + 1));
  bool di_values = opts.pattern == AggPattern::IdemProduct;

  auto semi_op = [&]() { return spec.plus_ops[rng() % uint32_t(spec.plus_ops.size())]; };
  // On {0,1}-valued inputs a sum can leave the value set; max/or/product
  // cannot. Positions at or past the first product must stay closed.
  auto closed_op = [&]() {
    for (int tries = 0; tries < 8; ++tries) {
      OpId op = semi_op();
      if (op != OpId::Sum) return op;
    }
    return spec.plus_ops.back();
  };

  std::vector<OpId> agg(size_t(n), spec.primary_plus());
  int bound = n - f;
  switch (opts.pattern) {
    case AggPattern::SingleSemiring: {
      OpId op = semi_op();
      for (int v = f; v < n; ++v) agg[size_t(v)] = op;
      break;
    }
    case AggPattern::TwoBlock: {
      OpId a = semi_op(), b = semi_op();
      int split = bound > 0 ? f + 1 + int(rng() % uint32_t(bound)) : f;
      for (int v = f; v < n; ++v) agg[size_t(v)] = v < split ? a : b;
      break;
    }
    case AggPattern::MixedSemiring: {
      for (int v = f; v < n; ++v) agg[size_t(v)] = semi_op();
      break;
    }
    case AggPattern::IdemProduct:
    case AggPattern::GeneralProduct: {
      int first_prod = -1;
      for (int v = f; v < n; ++v) {
        if (rng() % 3u == 0) {
          agg[size_t(v)] = OpId::Prod;
          if (first_prod < 0) first_prod = v;
        } else {
          agg[size_t(v)] =
              (di_values && first_prod >= 0) ? closed_op() : semi_op();
        }
      }
      if (first_prod < 0 && bound > 0) agg[size_t(n - 1 - rng() % uint32_t(bound))] = OpId::Prod;
      break;
    }
  }
  if (f < n) {  // at least one semiring aggregate unless the query is a pure join
    bool has_semi = false;
    for (int v = f; v < n; ++v) has_semi |= agg[size_t(v)] != OpId::Prod;
    if (!has_semi) agg[size_t(f)] = closed_op();
  }

  int m = 1 + int(rng() % uint32_t(opts.m_max));
  std::vector<VertexSet> edges;
  for (int e = 0; e < m; ++e) {
    VertexSet s;
    int sz = 1 + int(rng() % uint32_t(std::min(3, n)));
    while (int(s.size()) < sz) s = vs_union(s, {Vertex(rng() % uint32_t(n))});
    edges.push_back(s);
  }

  Query q;
  q.spec = spec;
  q.shape.h = Hypergraph::make(n, edges);
  q.shape.f = f;
  q.shape.agg = agg;
  q.domains.assign(size_t(n), {});
  for (int v = 0; v < n; ++v) {
    uint32_t dom = 2 + rng() % uint32_t(std::max(1u, opts.dom_max - 1));
    for (uint32_t x = 0; x < dom; ++x) q.domains[size_t(v)].push_back(std::to_string(x));
  }
  for (const auto& e : q.shape.h.edges) {
    std::vector<uint32_t> doms;
    for (Vertex v : e.vars) doms.push_back(q.domain_size(v));
    q.factors.push_back(dense_factor(spec, e.vars, doms,
                                     [&](const Key&) { return random_value(rng, spec, di_values); }));
  }
  q.validate();
  return q;
}

inline Query sum_max_path() {  // Σ_{x0} max_{x1} Σ_{x2} ψ01 ψ02
  return make_query(SemiringSpec::named("nat"), 3, 0, {OpId::Sum, OpId::Max, OpId::Sum},
                    {{0, 1}, {0, 2}});
}

// max,max,Σ,Σ,⊗,max,⊗,max over nine mixed edges; {0,1}-valued factors.
inline Query two_block_mixed() {
  return make_query(
      SemiringSpec::named("nat"), 8, 0,
      {OpId::Max, OpId::Max, OpId::Sum, OpId::Sum, OpId::Prod, OpId::Max, OpId::Prod, OpId::Max},
      {{0, 2}, {1, 3}, {2, 3}, {0, 4}, {0, 5}, {1, 5}, {1, 4, 6}, {0, 5, 6}, {1, 6, 7}});
}

inline Query forall_exists_star(int n = 3) {  // n product vars over one n-ary edge, ∃-var via Or
  std::vector<VertexSet> edges;
  VertexSet s;
  for (int i = 0; i < n; ++i) s.push_back(i);
  edges.push_back(s);
  for (int i = 0; i < n; ++i) edges.push_back({i, n});
  std::vector<OpId> agg(size_t(n), OpId::Prod);
  agg.push_back(OpId::Or);
  return make_query(SemiringSpec::named("bool"), n + 1, 0, agg, edges);
}

inline Query sum_prod_max_disjoint() {  // Σ_{x0} ⊗_{x1} max_{x2}, three unary edges
  return make_query(SemiringSpec::named("nat"), 3, 0, {OpId::Sum, OpId::Prod, OpId::Max},
                    {{0}, {1}, {2}});
}

}  // namespace faqtest
