#include "faq/factor.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "faq/error.hpp"

namespace faq {

ListingFactor ListingFactor::build(
    const SemiringSpec& spec, std::vector<int> support,
    std::vector<std::pair<Key, SemiringValue>> tuples) {
  ListingFactor f;
  f.spec = spec;
  f.support = std::move(support);
  int arity = f.arity();

  std::vector<size_t> order;
  for (size_t i = 0; i < tuples.size(); ++i) {
    require(int(tuples[i].first.size()) == arity, ErrKind::User,
            "tuple arity " + std::to_string(tuples[i].first.size()) +
                " does not match factor arity " + std::to_string(arity));
    if (!spec.is_zero(tuples[i].second)) order.push_back(i);
  }
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return tuples[a].first < tuples[b].first;
  });
  for (size_t i = 0; i + 1 < order.size(); ++i)
    require(tuples[order[i]].first != tuples[order[i + 1]].first,
            ErrKind::User, "duplicate tuple key in factor");

  f.keys.reserve(order.size() * arity);
  f.values.reserve(order.size());
  for (size_t i : order) {
    f.keys.insert(f.keys.end(), tuples[i].first.begin(),
                  tuples[i].first.end());
    f.values.push_back(std::move(tuples[i].second));
  }
  return f;
}

// Rows matching `prefix` form a contiguous range; narrow [lo, hi) by one
// more column equal to `val`.
static void narrow(const ListingFactor& f, size_t& lo, size_t& hi, int col,
                   uint32_t val) {
  int arity = f.arity();
  const uint32_t* base = f.keys.data();
  auto cmp_lo = [&](size_t r) { return base[r * arity + col] < val; };
  size_t a = lo, b = hi;
  while (a < b) {
    size_t mid = (a + b) / 2;
    if (cmp_lo(mid))
      a = mid + 1;
    else
      b = mid;
  }
  size_t new_lo = a;
  a = new_lo;
  b = hi;
  while (a < b) {
    size_t mid = (a + b) / 2;
    if (base[mid * arity + col] <= val)
      a = mid + 1;
    else
      b = mid;
  }
  lo = new_lo;
  hi = a;
}

std::optional<uint32_t> ListingFactor::successor(const Key& prefix,
                                                 std::optional<uint32_t> y,
                                                 uint64_t* probes) const {
  require(int(prefix.size()) < arity(), ErrKind::User,
          "successor prefix must be shorter than the factor arity");
  size_t lo = 0, hi = size();
  for (size_t j = 0; j < prefix.size(); ++j) {
    narrow(*this, lo, hi, int(j), prefix[j]);
    if (probes) ++*probes;
    if (lo == hi) return std::nullopt;
  }
  // among rows [lo,hi) the next column is sorted; find first value > y
  int col = int(prefix.size());
  int ar = arity();
  const uint32_t* base = keys.data();
  size_t a = lo, b = hi;
  if (y) {
    while (a < b) {
      size_t mid = (a + b) / 2;
      if (base[mid * ar + col] <= *y)
        a = mid + 1;
      else
        b = mid;
    }
  }
  if (probes) ++*probes;
  if (a == hi) return std::nullopt;
  return base[a * ar + col];
}

SemiringValue ListingFactor::value_at(const Key& key,
                                      uint64_t* probes) const {
  require(int(key.size()) == arity(), ErrKind::User,
          "value_at key arity mismatch");
  size_t lo = 0, hi = size();
  for (int j = 0; j < arity(); ++j) {
    narrow(*this, lo, hi, j, key[j]);
    if (probes) ++*probes;
    if (lo == hi) return spec.zero();
  }
  if (lo == hi) return spec.zero();  // nullary factor with no stored value
  return values[lo];
}

ListingFactor ListingFactor::product_marginalize(int var,
                                                 uint32_t domain_size,
                                                 MissingPolicy policy,
                                                 uint64_t* times_ops) const {
  require(!support.empty() && support.back() == var, ErrKind::User,
          "can only marginalize the last variable in the key order");
  int ar = arity();
  std::vector<std::pair<Key, SemiringValue>> out;
  size_t r = 0;
  while (r < size()) {
    size_t g = r + 1;
    while (g < size() &&
           std::equal(row(r), row(r) + ar - 1, row(g))) {
      ++g;
    }
    SemiringValue acc = values[r];
    for (size_t i = r + 1; i < g; ++i) {
      acc = spec.times(acc, values[i]);
      if (times_ops) ++*times_ops;
    }
    if (g - r < domain_size && policy == MissingPolicy::ZeroAbsent) {
      acc = spec.times(acc, spec.zero());
      if (times_ops) ++*times_ops;
    }
    if (!spec.is_zero(acc))
      out.emplace_back(Key(row(r), row(r) + ar - 1), std::move(acc));
    r = g;
  }
  std::vector<int> new_support(support.begin(), support.end() - 1);
  return build(spec, std::move(new_support), std::move(out));
}

ListingFactor ListingFactor::indicator_projection(const VertexSet& t) const {
  std::vector<int> cols;
  std::vector<int> new_support;
  for (int j = 0; j < arity(); ++j)
    if (vs_contains(t, support[j])) {
      cols.push_back(j);
      new_support.push_back(support[j]);
    }
  require(!cols.empty(), ErrKind::Structural,
          "indicator projection onto a disjoint vertex set");
  std::vector<Key> proj;
  proj.reserve(size());
  for (size_t r = 0; r < size(); ++r) {
    Key k;
    k.reserve(cols.size());
    for (int j : cols) k.push_back(row(r)[j]);
    proj.push_back(std::move(k));
  }
  std::sort(proj.begin(), proj.end());
  proj.erase(std::unique(proj.begin(), proj.end()), proj.end());
  std::vector<std::pair<Key, SemiringValue>> tuples;
  tuples.reserve(proj.size());
  for (auto& k : proj) tuples.emplace_back(std::move(k), spec.one());
  return build(spec, std::move(new_support), std::move(tuples));
}

ListingFactor ListingFactor::reorder(const std::vector<int>& new_support) const {
  require(new_support.size() == support.size(), ErrKind::User,
          "reorder must keep the same variables");
  std::vector<int> perm;  // perm[j] = column in the old order
  for (int v : new_support) {
    auto it = std::find(support.begin(), support.end(), v);
    require(it != support.end(), ErrKind::User,
            "reorder must keep the same variables");
    perm.push_back(int(it - support.begin()));
  }
  std::vector<int> check = perm;
  std::sort(check.begin(), check.end());
  for (int j = 0; j < int(check.size()); ++j)
    require(check[j] == j, ErrKind::User, "reorder repeats a variable");

  std::vector<std::pair<Key, SemiringValue>> tuples;
  tuples.reserve(size());
  for (size_t r = 0; r < size(); ++r) {
    Key k;
    k.reserve(perm.size());
    for (int j : perm) k.push_back(row(r)[j]);
    tuples.emplace_back(std::move(k), values[r]);
  }
  return build(spec, new_support, std::move(tuples));
}

}  // namespace faq
