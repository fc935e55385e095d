#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "faq/semiring.hpp"
#include "faq/vset.hpp"

namespace faq {

using Key = std::vector<uint32_t>;

// What product_marginalize does with a key group that covers fewer than
// |Dom| values of the marginalized variable: ZeroAbsent multiplies in a
// single semiring zero (annihilating the group), which is the meaning of a
// product over the whole domain; SkipAbsent multiplies stored leaves only
// and is sound exactly when the caller knows the product is idempotent and
// treats stored support as the whole domain.
enum class MissingPolicy { ZeroAbsent, SkipAbsent };

// A factor in listing representation: the non-zero tuples of a function on
// Dom^arity, keyed by 32-bit ordinals, sorted lexicographically. Behaves as
// an ordered trie through binary-search ranges; immutable after build.
struct ListingFactor {
  SemiringSpec spec;
  std::vector<int> support;  // variable ids in trie key order
  std::vector<uint32_t> keys;  // row-major, arity() columns per row
  std::vector<SemiringValue> values;

  int arity() const { return int(support.size()); }
  size_t size() const { return values.size(); }
  const uint32_t* row(size_t r) const { return keys.data() + r * arity(); }

  static ListingFactor build(const SemiringSpec& spec,
                             std::vector<int> support,
                             std::vector<std::pair<Key, SemiringValue>> tuples);

  // Smallest next-coordinate value strictly greater than y (nullopt y means
  // no lower bound) among tuples extending prefix; nullopt result means
  // none. O(arity · log size). `probes` counts binary-search descents.
  std::optional<uint32_t> successor(const Key& prefix,
                                    std::optional<uint32_t> y,
                                    uint64_t* probes = nullptr) const;

  // Stored value for the key, or the semiring zero. Descends level by level
  // and stops at the first absent coordinate; `probes` counts levels
  // visited.
  SemiringValue value_at(const Key& key, uint64_t* probes = nullptr) const;

  // Multiplies out the trailing variable: result(x) = ⊗ over the stored
  // leaves of the group, times one zero when the group misses domain values
  // and the policy is ZeroAbsent. `times_ops` counts ⊗ applications, which
  // never exceed size().
  ListingFactor product_marginalize(int var, uint32_t domain_size,
                                    MissingPolicy policy,
                                    uint64_t* times_ops = nullptr) const;

  // Support becomes support ∩ t (in the current key order); keys are the
  // deduplicated projections of stored keys; every value is the semiring
  // one.
  ListingFactor indicator_projection(const VertexSet& t) const;

  // Same function, keys permuted to the new support order.
  ListingFactor reorder(const std::vector<int>& new_support) const;
};

}  // namespace faq
