#include "faq/query.hpp"

#include "faq/error.hpp"

namespace faq {

namespace {

bool value_is_negative(const SemiringValue& v) {
  switch (v.tag) {
    case Carrier::Nat:
      return std::get<Int>(v.payload) < 0;
    case Carrier::Rational:
      return std::get<Rat>(v.payload) < 0;
    case Carrier::F64:
      return std::get<double>(v.payload) < 0.0;
    default:
      return false;
  }
}

}  // namespace

std::vector<SemiringValue> Query::di_set() const {
  if (!idempotent_set.empty()) return idempotent_set;
  return {spec.zero(), spec.one()};
}

bool Query::op_closed_under_di(OpId op) const {
  auto di = di_set();
  auto in_di = [&](const SemiringValue& v) {
    for (const auto& d : di)
      if (spec.equal(v, d)) return true;
    return false;
  };
  for (const auto& a : di)
    for (const auto& b : di) {
      SemiringValue r = op == OpId::Prod ? spec.times(a, b) : spec.plus(op, a, b);
      if (!in_di(r)) return false;
    }
  return true;
}

bool Query::values_within_di() const {
  auto di = di_set();
  auto in_di = [&](const SemiringValue& v) {
    if (spec.is_zero(v)) return true;
    for (const auto& d : di)
      if (spec.equal(v, d)) return true;
    return false;
  };
  for (const auto& fac : factors)
    for (const auto& v : fac.values)
      if (!in_di(v)) return false;
  return true;
}

bool Query::ops_identical_on_di(OpId a, OpId b) const {
  auto di = di_set();
  for (const auto& x : di)
    for (const auto& y : di)
      if (!spec.equal(spec.plus(a, x, y), spec.plus(b, x, y))) return false;
  return true;
}

void Query::validate() const {
  shape.validate();
  const int n = shape.h.n;
  if (int(domains.size()) != n)
    fail_user("query: one domain per variable required");
  for (int v = 0; v < n; ++v)
    if (domains[v].empty())
      fail_user("query: empty domain for variable " + std::to_string(v));
  if (factors.size() != shape.h.edges.size())
    fail_user("query: one factor per edge required");

  bool any_semiring = false;
  for (int v = shape.f; v < n; ++v) {
    OpId op = shape.agg[v];
    if (op == OpId::Prod) continue;
    any_semiring = true;
    if (!spec.has_plus(op))
      fail_user("query: aggregate " + op_name(op) +
                " is not admissible in semiring " + spec.name());
  }
  if (!any_semiring && shape.f < n)
    fail_user(
        "query: at least one semiring aggregate required "
        "when bound variables exist");

  for (size_t e = 0; e < factors.size(); ++e) {
    const auto& fac = factors[e];
    VertexSet sup(fac.support.begin(), fac.support.end());
    if (vs_normalize(sup) != shape.h.edges[e].vars)
      fail_user("query: factor support does not match edge " +
                shape.h.edges[e].name);
    for (int col = 0; col < fac.arity(); ++col) {
      uint32_t dom = domain_size(fac.support[col]);
      for (size_t r = 0; r < fac.size(); ++r)
        if (fac.row(r)[col] >= dom)
          fail_user("query: factor key out of domain range on edge " +
                    shape.h.edges[e].name);
    }
  }

  // Max over an ordered numeric carrier is only a semiring op on
  // nonnegative values: max(a, 0) = a needs a >= 0.
  bool uses_max = false;
  for (int v = shape.f; v < n; ++v)
    if (shape.agg[v] == OpId::Max) uses_max = true;
  if (uses_max && (spec.carrier == Carrier::Nat || spec.carrier == Carrier::Rational ||
                   spec.carrier == Carrier::F64)) {
    for (const auto& fac : factors)
      for (const auto& v : fac.values)
        if (value_is_negative(v))
          fail_user("query: max aggregate requires nonnegative factor values");
  }

  for (const auto& v : idempotent_set)
    if (v.tag != spec.carrier)
      fail_user("query: idempotent-set value has wrong carrier");
}

}  // namespace faq
