#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "faq/rational.hpp"

namespace faq {

// Value carriers. MaxProd/MinPlus are exact-rational; F64/Complex are the only
// floating-point carriers. Avg/Unique/MaxTimes are the lifted pair carriers of
// the non-semiring reductions and always hold lifted values.
enum class Carrier : uint8_t {
  Bool,
  Nat,
  Rational,
  F64,
  Complex,
  MaxProd,
  MinPlus,
  Set,
  Avg,
  Unique,
  MaxTimes,
};

// Aggregate operator ids. A query's bound-variable tags pick one of these;
// Prod marks the product aggregate (the family's own multiplication).
enum class OpId : uint8_t { Sum, Max, Min, Or, Union, Prod };

std::string op_name(OpId op);
std::optional<OpId> op_from_name(std::string_view name);

// Fixed-universe bitset for the set semiring (union = plus, intersection = times).
struct SetVal {
  uint32_t universe = 0;
  std::vector<uint64_t> words;

  static SetVal empty(uint32_t universe);
  static SetVal full(uint32_t universe);
  void insert(uint32_t x);
  bool contains(uint32_t x) const;
  bool operator==(const SetVal& o) const { return universe == o.universe && words == o.words; }
};

// Lifted average value: (sum of inputs, count of non-zero inputs).
struct AvgPair {
  Rat sum;
  Int cnt;
  bool operator==(const AvgPair& o) const { return sum == o.sum && cnt == o.cnt; }
};

// Lifted max-times value: an interval [lo, hi], or the NaN pair (the zero).
struct MaxTimesVal {
  bool nan = false;
  Rat lo, hi;
  bool operator==(const MaxTimesVal& o) const {
    return nan == o.nan && (nan || (lo == o.lo && hi == o.hi));
  }
};

using Payload = std::variant<bool, Int, Rat, ExtRat, double, std::complex<double>, SetVal, AvgPair,
                             uint8_t, MaxTimesVal>;

struct SemiringValue {
  Carrier tag = Carrier::Bool;
  Payload payload = false;

  bool operator==(const SemiringValue& o) const { return tag == o.tag && payload == o.payload; }
};

// A carrier family: one multiplication, a set of admissible plus operators
// (every (carrier, plus op, times) triple shipped here is a commutative
// semiring sharing the same zero and one). plus_ops.front() is the primary op.
struct SemiringSpec {
  Carrier carrier = Carrier::Bool;
  uint32_t set_universe = 0;  // Set carrier only
  std::vector<OpId> plus_ops;

  SemiringValue zero() const;
  SemiringValue one() const;
  bool is_zero(const SemiringValue& a) const;
  bool has_plus(OpId op) const;
  OpId primary_plus() const { return plus_ops.front(); }

  SemiringValue plus(OpId op, const SemiringValue& a, const SemiringValue& b) const;
  SemiringValue plus(const SemiringValue& a, const SemiringValue& b) const {
    return plus(primary_plus(), a, b);
  }
  SemiringValue times(const SemiringValue& a, const SemiringValue& b) const;

  // a^(times k), k >= 1, by repeated squaring: at most 2*ceil(log2 k)
  // multiplications; idempotent values short-circuit with zero multiplications.
  SemiringValue power(const SemiringValue& a, uint64_t k, uint64_t* mult_count = nullptr) const;

  bool is_idempotent(const SemiringValue& a) const;  // a*a == a

  bool equal(const SemiringValue& a, const SemiringValue& b) const { return a == b; }
  // Exact on exact carriers; relative tolerance on F64/Complex.
  bool approx_equal(const SemiringValue& a, const SemiringValue& b, double rel_tol) const;

  SemiringValue parse_value(std::string_view text) const;
  std::string print_value(const SemiringValue& a) const;

  std::string name() const;
  // Names: bool nat rat f64 complex maxprod minplus set:<universe> avg unique maxtimes
  static SemiringSpec named(std::string_view dsl_name);
};

// Non-semiring reductions. Base carriers: Avg <- rat, Unique <- bool, MaxTimes <- rat.
enum class Reduction : uint8_t { Avg, Unique, MaxTimes };

// f-bar: embeds a base value into the lifted carrier. Zero maps to lifted zero.
SemiringValue lift(Reduction kind, const SemiringValue& base);
// f: extracts the final answer. Avg: sum/cnt (0 when cnt = 0); Unique: cnt == 1;
// MaxTimes: the interval's upper end. Lowering the max-times NaN pair is an
// error: that value denotes the absent entry and is handled by the caller.
SemiringValue lower(Reduction kind, const SemiringValue& lifted);

std::optional<Reduction> carrier_reduction(Carrier c);
Carrier reduction_base_carrier(Reduction kind);

}  // namespace faq
