#include "faq/engine.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>

#include "faq/error.hpp"
#include "faq/evo.hpp"
#include "faq/width.hpp"

namespace faq {

namespace {

std::vector<uint32_t> domain_vector(const Query& q) {
  std::vector<uint32_t> dom(size_t(q.n()));
  for (int v = 0; v < q.n(); ++v) dom[size_t(v)] = q.domain_size(v);
  return dom;
}

// Product aggregates cannot run inside the max-times carrier: its ⊗ is not
// the lifted multiplication the final lowering expects under repetition.
void reject_unsupported_aggregates(const Query& q) {
  if (q.spec.carrier != Carrier::MaxTimes) return;
  for (int v = q.shape.f; v < q.n(); ++v)
    if (q.shape.agg[size_t(v)] == OpId::Prod)
      fail_user("the max-times carrier does not support product aggregates");
}

SemiringValue nullary_value(const SemiringSpec& spec, const ListingFactor& f) {
  return f.size() > 0 ? f.values[0] : spec.zero();
}

VertexSet ids_of(const std::vector<int>& support) {
  VertexSet s(support.begin(), support.end());
  std::sort(s.begin(), s.end());
  return s;
}

// AGM estimate of a sub-join over `b`, taking every live factor as an edge
// sized by its current tuple count.
double live_agm(const std::vector<ListingFactor>& factors, int n, const VertexSet& b) {
  if (b.empty()) return 1.0;
  std::vector<VertexSet> sets;
  std::map<int, long long> sizes;
  for (size_t i = 0; i < factors.size(); ++i) {
    sets.push_back(ids_of(factors[i].support));
    sizes[int(i)] = std::max<long long>(1, (long long)factors[i].size());
  }
  Hypergraph h = Hypergraph::make(n, sets);
  return agm_bound(h, b, sizes).bound;
}

Vertex check_step(const EvalState& st, int k) {
  require(st.q != nullptr, ErrKind::Internal, "elimination on an uninitialized state");
  require(k >= 1 && k <= int(st.sigma.size()), ErrKind::User,
          "elimination position " + std::to_string(k) + " is out of range");
  require(k == st.next_k, ErrKind::User,
          "elimination steps run from position n down to 1; position " + std::to_string(st.next_k) +
              " is pending, not " + std::to_string(k));
  return st.sigma[size_t(k - 1)];
}

void finish_step(EvalState& st) {
  --st.next_k;
  if (st.next_k == st.q->shape.f) st.snapshot = st.factors;
}

// Splits the live factors into the boundary ∂ (support contains v) and the
// rest. Boundary entries are moved out of st.factors.
std::pair<std::vector<ListingFactor>, std::vector<ListingFactor>> split_boundary(EvalState& st,
                                                                                 Vertex v) {
  std::vector<ListingFactor> del;
  std::vector<ListingFactor> rest;
  for (auto& f : st.factors) {
    bool hit = std::find(f.support.begin(), f.support.end(), v) != f.support.end();
    (hit ? del : rest).push_back(std::move(f));
  }
  return {std::move(del), std::move(rest)};
}

std::vector<Vertex> order_by_sigma(const EvalState& st, const VertexSet& u, int k) {
  std::vector<Vertex> order;
  order.reserve(u.size());
  for (int i = 0; i < k; ++i)
    if (vs_contains(u, st.sigma[size_t(i)])) order.push_back(st.sigma[size_t(i)]);
  if (order.size() != u.size())
    fail_internal("boundary variables escape the eliminated prefix");
  return order;
}

}  // namespace

ListingFactor brute_force_eval(const Query& q, uint64_t cap) {
  q.validate();
  reject_unsupported_aggregates(q);
  uint64_t grid = 1;
  for (int v = 0; v < q.n(); ++v) {
    uint64_t d = q.domain_size(v);
    if (d == 0) {
      grid = 0;
      break;
    }
    if (grid > cap / d)
      fail_cap("the full domain grid exceeds the evaluation cap of " + std::to_string(cap) +
               " points");
    grid *= d;
  }

  std::vector<uint32_t> asg(size_t(q.n()), 0);
  std::function<SemiringValue(int)> fold = [&](int pos) -> SemiringValue {
    if (pos == q.n()) {
      SemiringValue v = q.spec.one();
      for (const auto& fac : q.factors) {
        Key k;
        k.reserve(fac.support.size());
        for (int var : fac.support) k.push_back(asg[size_t(var)]);
        v = q.spec.times(v, fac.value_at(k));
      }
      return v;
    }
    OpId op = q.shape.agg[size_t(pos)];
    SemiringValue acc = q.spec.zero();
    bool first = true;
    for (uint32_t x = 0; x < q.domain_size(pos); ++x) {
      asg[size_t(pos)] = x;
      SemiringValue term = fold(pos + 1);
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
  };

  std::vector<std::pair<Key, SemiringValue>> rows;
  std::function<void(int)> walk_frees = [&](int v) {
    if (v == q.shape.f) {
      rows.push_back({Key(asg.begin(), asg.begin() + q.shape.f), fold(q.shape.f)});
      return;
    }
    for (uint32_t x = 0; x < q.domain_size(v); ++x) {
      asg[size_t(v)] = x;
      walk_frees(v + 1);
    }
  };
  walk_frees(0);

  std::vector<int> support;
  for (int v = 0; v < q.shape.f; ++v) support.push_back(v);
  return ListingFactor::build(q.spec, support, std::move(rows));
}

namespace {

// Backtracking multiway join. Variables bind in `order`; at each level the
// candidate value is raised to the max of the participating factors'
// successors until every factor agrees, which skips whole subtrees of
// mismatches. Leaves fold into the current out_prefix group.
struct JoinWalk {
  const SemiringSpec& spec;
  const std::vector<Vertex>& order;
  size_t out_prefix;
  OpId op;
  const std::vector<const ListingFactor*>& factors;
  const std::vector<uint32_t>& dom_of;

  std::vector<std::vector<std::pair<size_t, size_t>>> levels;  // per depth: (factor, its level)
  std::vector<Key> fkey;  // per factor: partially bound key buffer
  Key asg;
  std::vector<std::pair<Key, SemiringValue>> rows;
  bool group_open = false;
  Key group_key;
  SemiringValue group_acc;
  uint64_t probes = 0, tuples = 0, plus_ops = 0, times_ops = 0;

  void close_group() {
    if (group_open && !spec.is_zero(group_acc)) rows.push_back({group_key, group_acc});
    group_open = false;
  }

  void leaf() {
    ++tuples;
    SemiringValue v = spec.one();
    bool first = true;
    for (size_t i = 0; i < factors.size(); ++i) {
      SemiringValue x = factors[i]->value_at(fkey[i], &probes);
      if (first) {
        v = x;
        first = false;
      } else {
        v = spec.times(v, x);
        ++times_ops;
      }
    }
    Key gk(asg.begin(), asg.begin() + out_prefix);
    if (group_open && gk == group_key) {
      group_acc = spec.plus(op, group_acc, v);
      ++plus_ops;
    } else {
      close_group();
      group_open = true;
      group_key = std::move(gk);
      group_acc = v;
    }
  }

  void descend(size_t d) {
    if (d == order.size()) {
      leaf();
      return;
    }
    uint32_t dom = dom_of[size_t(order[d])];
    const auto& parts = levels[d];
    uint32_t next_c = 0;
    while (true) {
      uint32_t c = next_c;
      if (parts.empty()) {
        if (c >= dom) break;
      } else {
        bool dead = false;
        while (true) {
          bool moved = false;
          for (auto [fi, li] : parts) {
            Key prefix(fkey[fi].begin(), fkey[fi].begin() + li);
            auto r = factors[fi]->successor(
                prefix, c == 0 ? std::nullopt : std::optional<uint32_t>(c - 1), &probes);
            if (!r) {
              dead = true;
              break;
            }
            if (*r > c) {
              c = *r;
              moved = true;
            }
          }
          if (dead || !moved) break;
        }
        if (dead || c >= dom) break;
      }
      asg[d] = c;
      for (auto [fi, li] : parts) fkey[fi][li] = c;
      descend(d + 1);
      if (c + 1 == 0) break;  // ordinal space exhausted
      next_c = c + 1;
    }
  }
};

}  // namespace

KernelResult outside_in(const SemiringSpec& spec, const std::vector<Vertex>& order,
                        size_t out_prefix, OpId op,
                        const std::vector<const ListingFactor*>& factors,
                        const std::vector<uint32_t>& dom_of, EvalStats* stats) {
  require(out_prefix <= order.size(), ErrKind::Internal, "output prefix exceeds the join order");
  std::map<Vertex, size_t> pos;
  for (size_t i = 0; i < order.size(); ++i) {
    require(order[i] >= 0 && size_t(order[i]) < dom_of.size(), ErrKind::Structural,
            "join variable has no domain entry");
    require(pos.emplace(order[i], i).second, ErrKind::Structural, "join order repeats a variable");
  }

  JoinWalk w{spec, order, out_prefix, op, factors, dom_of, {}, {}, {}, {}, false, {}, spec.zero()};
  w.levels.assign(order.size(), {});
  w.asg.assign(order.size(), 0);
  w.fkey.resize(factors.size());
  for (size_t i = 0; i < factors.size(); ++i) {
    const ListingFactor& f = *factors[i];
    require(f.arity() > 0, ErrKind::Structural,
            "empty-support factors cannot join; fold them in as scalars");
    w.fkey[i].assign(size_t(f.arity()), 0);
    size_t prev = 0;
    for (size_t li = 0; li < f.support.size(); ++li) {
      auto it = pos.find(f.support[li]);
      require(it != pos.end(), ErrKind::Structural, "factor variable missing from the join order");
      require(li == 0 || it->second > prev, ErrKind::Structural,
              "factor support is not sorted by the join order");
      prev = it->second;
      w.levels[it->second].push_back({i, li});
    }
  }

  w.descend(0);
  w.close_group();

  KernelResult r;
  std::vector<int> support(order.begin(), order.begin() + out_prefix);
  r.out = ListingFactor::build(spec, std::move(support), std::move(w.rows));
  r.tuples = w.tuples;
  r.probes = w.probes;
  if (stats) {
    stats->probes += w.probes;
    stats->tuples += w.tuples;
    stats->plus_ops += w.plus_ops;
    stats->times_ops += w.times_ops;
  }
  return r;
}

EvalState make_eval_state(const Query& q, const VariableOrdering& sigma,
                          const EngineOptions& opts) {
  q.validate();
  reject_unsupported_aggregates(q);

  int n = q.n();
  require(int(sigma.size()) == n, ErrKind::User, "the ordering must list all " + std::to_string(n) +
                                                     " variables");
  std::vector<char> seen(size_t(n), 0);
  for (Vertex v : sigma) {
    require(v >= 0 && v < n, ErrKind::User, "ordering entry out of range");
    require(!seen[size_t(v)], ErrKind::User, "the ordering repeats a variable");
    seen[size_t(v)] = 1;
  }
  for (int i = 0; i < q.shape.f; ++i)
    require(sigma[size_t(i)] < q.shape.f, ErrKind::User,
            "free variables must occupy the leading positions of the ordering");
  if (opts.check_order && !evo_contains(q, sigma))
    fail_user(
        "the ordering is outside the admitted set for this query; disable order checking to force "
        "it");

  EvalState st;
  st.q = &q;
  st.sigma = sigma;
  st.opts = opts;
  st.scalar = q.spec.one();
  st.witness = q.spec.one();

  std::vector<int> pos(size_t(n), 0);
  for (int i = 0; i < n; ++i) pos[size_t(sigma[size_t(i)])] = i;
  for (const auto& f : q.factors) {
    if (f.support.empty()) {
      st.scalar = q.spec.times(st.scalar, f.value_at({}));
      ++st.stats.times_ops;
      continue;
    }
    std::vector<int> sup = f.support;
    std::sort(sup.begin(), sup.end(),
              [&](int a, int b) { return pos[size_t(a)] < pos[size_t(b)]; });
    st.factors.push_back(f.reorder(sup));
  }

  st.next_k = n;
  if (st.next_k == q.shape.f) st.snapshot = st.factors;
  return st;
}

void eliminate_semiring_var(EvalState& st, int k) {
  Vertex v = check_step(st, k);
  const Query& q = *st.q;
  require(k > q.shape.f, ErrKind::User,
          "position " + std::to_string(k) + " holds a free variable; use the free elimination");
  require(!q.shape.is_product(v), ErrKind::User,
          "position " + std::to_string(k) + " holds a product-aggregate variable");
  OpId op = q.shape.agg[size_t(v)];

  StepReport rep;
  rep.k = k;
  rep.var = v;
  rep.kind = StepReport::Semiring;

  auto [del, rest] = split_boundary(st, v);
  if (del.empty()) {
    // The variable appears in no factor: the aggregate folds dom copies of 𝟏
    // into a plain multiplier.
    uint32_t dom = q.domain_size(v);
    SemiringValue acc = q.spec.one();
    for (uint32_t i = 1; i < dom; ++i) {
      acc = q.spec.plus(op, acc, q.spec.one());
      ++st.stats.plus_ops;
    }
    st.scalar = q.spec.times(st.scalar, acc);
    ++st.stats.times_ops;
    st.factors = std::move(rest);
    rep.agm = 1.0;
    st.steps.push_back(std::move(rep));
    finish_step(st);
    return;
  }

  VertexSet u;
  for (const auto& f : del) u = vs_union(u, ids_of(f.support));
  rep.u = u;
  {
    std::vector<ListingFactor> live;
    for (const auto& f : del) live.push_back(f);
    for (const auto& f : rest) live.push_back(f);
    rep.agm = live_agm(live, q.n(), u);
  }

  std::vector<Vertex> order = order_by_sigma(st, u, k);
  std::vector<const ListingFactor*> parts;
  for (const auto& f : del) parts.push_back(&f);
  std::vector<ListingFactor> projections;
  if (st.opts.indicator_projections) {
    for (const auto& f : rest)
      if (vs_intersects(ids_of(f.support), u)) projections.push_back(f.indicator_projection(u));
    for (const auto& p : projections) parts.push_back(&p);
  }

  KernelResult kr =
      outside_in(q.spec, order, order.size() - 1, op, parts, domain_vector(q), &st.stats);
  rep.tuples = kr.tuples;
  rep.probes = kr.probes;

  st.factors = std::move(rest);
  if (order.size() == 1) {
    st.scalar = q.spec.times(st.scalar, nullary_value(q.spec, kr.out));
    ++st.stats.times_ops;
  } else {
    st.factors.push_back(std::move(kr.out));
  }
  st.steps.push_back(std::move(rep));
  finish_step(st);
}

void eliminate_product_var(EvalState& st, int k) {
  Vertex v = check_step(st, k);
  const Query& q = *st.q;
  require(k > q.shape.f, ErrKind::User,
          "position " + std::to_string(k) + " holds a free variable; use the free elimination");
  require(q.shape.is_product(v), ErrKind::User,
          "position " + std::to_string(k) + " does not hold a product-aggregate variable");
  uint32_t dom = q.domain_size(v);

  StepReport rep;
  rep.k = k;
  rep.var = v;
  rep.kind = StepReport::Product;

  uint64_t step_pm = 0;

  // Every factor (and the scalar) without the variable is raised to the
  // domain size; factor-wide idempotent ranges skip their pass outright.
  if (!q.spec.is_idempotent(st.scalar)) {
    uint64_t pm = 0;
    st.scalar = q.spec.power(st.scalar, dom, &pm);
    step_pm += pm;
  }

  auto [del, rest] = split_boundary(st, v);
  for (auto& f : rest) {
    bool all_idem = true;
    for (const auto& val : f.values)
      if (!q.spec.is_idempotent(val)) {
        all_idem = false;
        break;
      }
    if (all_idem) continue;
    for (auto& val : f.values) {
      uint64_t pm = 0;
      val = q.spec.power(val, dom, &pm);
      step_pm += pm;
    }
  }

  st.factors = std::move(rest);
  for (const auto& f : del) {
    uint64_t tm = 0;
    ListingFactor nf = f.product_marginalize(v, dom, q.missing, &tm);
    st.stats.times_ops += tm;
    if (nf.support.empty()) {
      st.scalar = q.spec.times(st.scalar, nullary_value(q.spec, nf));
      ++st.stats.times_ops;
    } else {
      st.factors.push_back(std::move(nf));
    }
  }

  st.stats.power_mults += step_pm;
  st.stats.times_ops += step_pm;
  rep.power_mults = step_pm;
  st.steps.push_back(std::move(rep));
  finish_step(st);
}

void eliminate_free_var(EvalState& st, int k) {
  Vertex v = check_step(st, k);
  const Query& q = *st.q;
  require(k <= q.shape.f, ErrKind::User, "bound variables must be eliminated first");

  StepReport rep;
  rep.k = k;
  rep.var = v;
  rep.kind = StepReport::Free;

  auto [del, rest] = split_boundary(st, v);
  if (del.empty()) {
    // Unconstrained free variable: the output phase enumerates its domain.
    st.factors = std::move(rest);
    rep.agm = 1.0;
    st.steps.push_back(std::move(rep));
    finish_step(st);
    return;
  }

  VertexSet u;
  for (const auto& f : del) u = vs_union(u, ids_of(f.support));
  rep.u = u;
  {
    std::vector<ListingFactor> live;
    for (const auto& f : del) live.push_back(f);
    for (const auto& f : rest) live.push_back(f);
    rep.agm = live_agm(live, q.n(), u);
  }

  // The free phase runs on indicators only: the bag over U_k is a 0/1 join
  // relation, and the real values stay in the snapshot for the output phase.
  std::vector<Vertex> order = order_by_sigma(st, u, k);
  std::vector<ListingFactor> projections;
  for (const auto& f : del) projections.push_back(f.indicator_projection(u));
  if (st.opts.indicator_projections)
    for (const auto& f : rest)
      if (vs_intersects(ids_of(f.support), u)) projections.push_back(f.indicator_projection(u));
  std::vector<const ListingFactor*> parts;
  for (const auto& p : projections) parts.push_back(&p);

  KernelResult kr = outside_in(q.spec, order, order.size(), q.spec.primary_plus(), parts,
                               domain_vector(q), &st.stats);
  rep.tuples = kr.tuples;
  rep.probes = kr.probes;

  st.factors = std::move(rest);
  if (order.size() > 1) {
    VertexSet keep = vs_remove(u, v);
    st.factors.push_back(kr.out.indicator_projection(keep));
  } else {
    st.witness =
        q.spec.times(st.witness, kr.out.size() > 0 ? q.spec.one() : q.spec.zero());
  }
  st.retained.push_back(std::move(kr.out));
  st.steps.push_back(std::move(rep));
  finish_step(st);
}

namespace {

void run_elimination(EvalState& st) {
  const Query& q = *st.q;
  for (int k = q.n(); k > q.shape.f; --k) {
    Vertex v = st.sigma[size_t(k - 1)];
    if (q.shape.is_product(v))
      eliminate_product_var(st, k);
    else
      eliminate_semiring_var(st, k);
  }
  for (int k = q.shape.f; k >= 1; --k) eliminate_free_var(st, k);
}

// The factorized output: snapshot ⋈ retained bags over the free prefix, the
// accumulated scalar multiplied through.
InsideOutResult finalize_output(EvalState& st) {
  const Query& q = *st.q;
  InsideOutResult r;
  if (q.shape.f == 0) {
    std::vector<std::pair<Key, SemiringValue>> rows;
    if (!q.spec.is_zero(st.scalar)) rows.push_back({{}, st.scalar});
    r.out = ListingFactor::build(q.spec, {}, std::move(rows));
    r.witness = q.spec.is_zero(st.scalar) ? q.spec.zero() : q.spec.one();
  } else {
    std::vector<const ListingFactor*> parts;
    for (const auto& f : st.snapshot) parts.push_back(&f);
    for (const auto& f : st.retained) parts.push_back(&f);
    std::vector<Vertex> order(st.sigma.begin(), st.sigma.begin() + q.shape.f);
    KernelResult kr = outside_in(q.spec, order, order.size(), q.spec.primary_plus(), parts,
                                 domain_vector(q), &st.stats);
    ListingFactor out = std::move(kr.out);
    if (q.spec.is_zero(st.scalar)) {
      out = ListingFactor::build(q.spec, out.support, {});
    } else if (!q.spec.equal(st.scalar, q.spec.one())) {
      std::vector<std::pair<Key, SemiringValue>> rows;
      rows.reserve(out.size());
      for (size_t i = 0; i < out.size(); ++i)
        rows.push_back({Key(out.row(i), out.row(i) + out.arity()),
                        q.spec.times(st.scalar, out.values[i])});
      st.stats.times_ops += out.size();
      out = ListingFactor::build(q.spec, out.support, std::move(rows));
    }
    std::vector<int> ascending;
    for (int v = 0; v < q.shape.f; ++v) ascending.push_back(v);
    r.out = out.reorder(ascending);
    r.witness = st.witness;
  }
  r.steps = st.steps;
  r.stats = st.stats;
  return r;
}

VariableOrdering approx_order(const Query& q) {
  try {
    return faqw_approx(q, FhtwOracle::Exact).order;
  } catch (const Error&) {
    return faqw_approx(q, FhtwOracle::Greedy).order;
  }
}

}  // namespace

InsideOutResult inside_out(const Query& q, const VariableOrdering& sigma,
                           const EngineOptions& opts) {
  EvalState st = make_eval_state(q, sigma, opts);
  run_elimination(st);
  return finalize_output(st);
}

uint64_t enumerate_output(EvalState& st,
                          const std::function<bool(const Key&, const SemiringValue&, uint64_t)>& emit) {
  require(st.q != nullptr, ErrKind::Internal, "enumeration on an uninitialized state");
  require(st.next_k == 0, ErrKind::User,
          "output enumeration requires every variable to be eliminated first");
  const Query& q = *st.q;
  const SemiringSpec& spec = q.spec;
  int f = q.shape.f;

  if (f == 0) {
    if (spec.is_zero(st.scalar)) return 0;
    emit(Key{}, st.scalar, 0);
    return 1;
  }
  if (spec.is_zero(st.witness)) return 0;

  // Each retained bag ends (in σ-position order) at the variable whose
  // elimination produced it; that variable's depth walks the bag's
  // successor stream while all earlier bag coordinates are already bound.
  std::vector<const ListingFactor*> guide(size_t(f), nullptr);
  for (const auto& b : st.retained)
    if (b.arity() > 0) guide[size_t(b.support.back())] = &b;

  std::vector<uint32_t> dom = domain_vector(q);
  std::vector<uint32_t> asg(size_t(f), 0);
  uint64_t probes = 0, last_mark = 0, emitted = 0;
  bool stop = false;

  std::function<void(int)> walk = [&](int d) {
    if (stop) return;
    if (d == f) {
      SemiringValue v = st.scalar;
      for (const auto& s : st.snapshot) {
        Key k;
        k.reserve(s.support.size());
        for (int var : s.support) k.push_back(asg[size_t(var)]);
        v = spec.times(v, s.value_at(k, &probes));
        ++st.stats.times_ops;
      }
      if (spec.is_zero(v)) return;
      Key outk(asg.begin(), asg.end());
      uint64_t gap = probes - last_mark;
      last_mark = probes;
      ++emitted;
      if (!emit(outk, v, gap)) stop = true;
      return;
    }
    Vertex var = st.sigma[size_t(d)];
    const ListingFactor* g = guide[size_t(var)];
    if (g == nullptr) {
      for (uint32_t c = 0; c < dom[size_t(var)] && !stop; ++c) {
        asg[size_t(var)] = c;
        walk(d + 1);
      }
      return;
    }
    Key prefix;
    prefix.reserve(g->support.size() - 1);
    for (size_t i = 0; i + 1 < g->support.size(); ++i)
      prefix.push_back(asg[size_t(g->support[i])]);
    std::optional<uint32_t> cur;
    while (!stop) {
      auto r = g->successor(prefix, cur, &probes);
      if (!r) break;
      cur = *r;
      asg[size_t(var)] = *r;
      walk(d + 1);
    }
  };
  walk(0);
  st.stats.probes += probes;
  return emitted;
}

EvalResult eval(const Query& q, const EvalRequest& req) {
  VariableOrdering sigma;
  bool truncated = false;
  switch (req.choice) {
    case OrderChoice::Given:
      sigma = req.sigma;
      break;
    case OrderChoice::AutoExact: {
      FaqwExactQuery ex = faqw_exact_query(q, req.linex_cap);
      if (ex.truncated) {
        sigma = approx_order(q);
        truncated = true;
      } else {
        sigma = ex.order;
      }
      break;
    }
    case OrderChoice::AutoApprox:
      sigma = approx_order(q);
      break;
  }

  EvalState st = make_eval_state(q, sigma, req.opts);
  run_elimination(st);

  EvalResult res;
  res.plan.sigma = sigma;
  res.plan.faqw = faqw_of_ordering(q.shape, sigma);
  res.plan.order_checked = req.opts.check_order;
  res.plan.truncated_search = truncated;

  if (req.mode == OutputMode::Listing) {
    InsideOutResult r = finalize_output(st);
    res.out = std::move(r.out);
    res.count = res.out.size();
    res.witness = r.witness;
  } else {
    std::function<bool(const Key&, const SemiringValue&, uint64_t)> sink;
    if (req.mode == OutputMode::Enumerate && req.sink)
      sink = req.sink;
    else
      sink = [](const Key&, const SemiringValue&, uint64_t) { return true; };
    res.count = enumerate_output(st, sink);
    res.witness = q.shape.f == 0
                      ? (q.spec.is_zero(st.scalar) ? q.spec.zero() : q.spec.one())
                      : st.witness;
  }

  res.plan.steps = st.steps;
  res.plan.stats = st.stats;
  return res;
}

}  // namespace faq
