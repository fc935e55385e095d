#include "faq/semiring.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "faq/error.hpp"

namespace faq {

std::string op_name(OpId op) {
  switch (op) {
    case OpId::Sum: return "sum";
    case OpId::Max: return "max";
    case OpId::Min: return "min";
    case OpId::Or: return "or";
    case OpId::Union: return "union";
    case OpId::Prod: return "prod";
  }
  fail_internal("unhandled op");
}

std::optional<OpId> op_from_name(std::string_view name) {
  if (name == "sum") return OpId::Sum;
  if (name == "max") return OpId::Max;
  if (name == "min") return OpId::Min;
  if (name == "or") return OpId::Or;
  if (name == "union") return OpId::Union;
  if (name == "prod" || name == "and" || name == "intersect") return OpId::Prod;
  return std::nullopt;
}

SetVal SetVal::empty(uint32_t universe) {
  SetVal s;
  s.universe = universe;
  s.words.assign((universe + 63) / 64, 0);
  return s;
}

SetVal SetVal::full(uint32_t universe) {
  SetVal s = empty(universe);
  for (auto& w : s.words) w = ~uint64_t(0);
  if (universe % 64 != 0 && !s.words.empty())
    s.words.back() &= (uint64_t(1) << (universe % 64)) - 1;
  return s;
}

void SetVal::insert(uint32_t x) { words[x / 64] |= uint64_t(1) << (x % 64); }
bool SetVal::contains(uint32_t x) const { return (words[x / 64] >> (x % 64)) & 1; }

namespace {

void check_tag(const SemiringSpec& spec, const SemiringValue& a) {
  if (a.tag != spec.carrier)
    fail_user("carrier mismatch: value is not a " + spec.name() + " value");
  if (spec.carrier == Carrier::Set && std::get<SetVal>(a.payload).universe != spec.set_universe)
    fail_user("set universe mismatch");
}

uint8_t cap2(long x) { return static_cast<uint8_t>(std::min(x, 2L)); }

MaxTimesVal mt_times(const MaxTimesVal& a, const MaxTimesVal& b) {
  if (a.nan || b.nan) return MaxTimesVal{true, Rat(0), Rat(0)};
  Rat p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
  Rat lo = std::min(std::min(p1, p2), std::min(p3, p4));
  Rat hi = std::max(std::max(p1, p2), std::max(p3, p4));
  return MaxTimesVal{false, lo, hi};
}

}  // namespace

SemiringValue SemiringSpec::zero() const {
  switch (carrier) {
    case Carrier::Bool: return {carrier, false};
    case Carrier::Nat: return {carrier, Int(0)};
    case Carrier::Rational: return {carrier, Rat(0)};
    case Carrier::F64: return {carrier, 0.0};
    case Carrier::Complex: return {carrier, std::complex<double>(0, 0)};
    case Carrier::MaxProd: return {carrier, Rat(0)};
    case Carrier::MinPlus: return {carrier, ExtRat::infinity()};
    case Carrier::Set: return {carrier, SetVal::empty(set_universe)};
    case Carrier::Avg: return {carrier, AvgPair{Rat(0), Int(0)}};
    case Carrier::Unique: return {carrier, uint8_t(0)};
    case Carrier::MaxTimes: return {carrier, MaxTimesVal{true, Rat(0), Rat(0)}};
  }
  fail_internal("unhandled carrier");
}

SemiringValue SemiringSpec::one() const {
  switch (carrier) {
    case Carrier::Bool: return {carrier, true};
    case Carrier::Nat: return {carrier, Int(1)};
    case Carrier::Rational: return {carrier, Rat(1)};
    case Carrier::F64: return {carrier, 1.0};
    case Carrier::Complex: return {carrier, std::complex<double>(1, 0)};
    case Carrier::MaxProd: return {carrier, Rat(1)};
    case Carrier::MinPlus: return {carrier, ExtRat(Rat(0))};
    case Carrier::Set: return {carrier, SetVal::full(set_universe)};
    case Carrier::Avg: return {carrier, AvgPair{Rat(1), Int(1)}};
    case Carrier::Unique: return {carrier, uint8_t(1)};
    case Carrier::MaxTimes: return {carrier, MaxTimesVal{false, Rat(1), Rat(1)}};
  }
  fail_internal("unhandled carrier");
}

bool SemiringSpec::is_zero(const SemiringValue& a) const {
  check_tag(*this, a);
  return a == zero();
}

bool SemiringSpec::has_plus(OpId op) const {
  return std::find(plus_ops.begin(), plus_ops.end(), op) != plus_ops.end();
}

SemiringValue SemiringSpec::plus(OpId op, const SemiringValue& a, const SemiringValue& b) const {
  check_tag(*this, a);
  check_tag(*this, b);
  if (!has_plus(op))
    fail_user("aggregate '" + op_name(op) + "' is not a plus operator of semiring " + name());
  switch (carrier) {
    case Carrier::Bool:
      return {carrier, std::get<bool>(a.payload) || std::get<bool>(b.payload)};
    case Carrier::Nat: {
      const Int& x = std::get<Int>(a.payload);
      const Int& y = std::get<Int>(b.payload);
      return {carrier, op == OpId::Sum ? Int(x + y) : std::max(x, y)};
    }
    case Carrier::Rational: {
      const Rat& x = std::get<Rat>(a.payload);
      const Rat& y = std::get<Rat>(b.payload);
      return {carrier, op == OpId::Sum ? Rat(x + y) : std::max(x, y)};
    }
    case Carrier::F64: {
      double x = std::get<double>(a.payload), y = std::get<double>(b.payload);
      return {carrier, op == OpId::Sum ? x + y : std::max(x, y)};
    }
    case Carrier::Complex:
      return {carrier,
              std::get<std::complex<double>>(a.payload) + std::get<std::complex<double>>(b.payload)};
    case Carrier::MaxProd:
      return {carrier, std::max(std::get<Rat>(a.payload), std::get<Rat>(b.payload))};
    case Carrier::MinPlus:
      return {carrier, ext_min(std::get<ExtRat>(a.payload), std::get<ExtRat>(b.payload))};
    case Carrier::Set: {
      SetVal r = std::get<SetVal>(a.payload);
      const SetVal& s = std::get<SetVal>(b.payload);
      for (size_t i = 0; i < r.words.size(); i++) r.words[i] |= s.words[i];
      return {carrier, r};
    }
    case Carrier::Avg: {
      const AvgPair& x = std::get<AvgPair>(a.payload);
      const AvgPair& y = std::get<AvgPair>(b.payload);
      return {carrier, AvgPair{x.sum + y.sum, x.cnt + y.cnt}};
    }
    case Carrier::Unique:
      return {carrier, cap2(long(std::get<uint8_t>(a.payload)) + std::get<uint8_t>(b.payload))};
    case Carrier::MaxTimes: {
      const MaxTimesVal& x = std::get<MaxTimesVal>(a.payload);
      const MaxTimesVal& y = std::get<MaxTimesVal>(b.payload);
      if (x.nan) return b;
      if (y.nan) return a;
      return {carrier, MaxTimesVal{false, std::min(x.lo, y.lo), std::max(x.hi, y.hi)}};
    }
  }
  fail_internal("unhandled carrier");
}

SemiringValue SemiringSpec::times(const SemiringValue& a, const SemiringValue& b) const {
  check_tag(*this, a);
  check_tag(*this, b);
  switch (carrier) {
    case Carrier::Bool:
      return {carrier, std::get<bool>(a.payload) && std::get<bool>(b.payload)};
    case Carrier::Nat:
      return {carrier, Int(std::get<Int>(a.payload) * std::get<Int>(b.payload))};
    case Carrier::Rational:
      return {carrier, Rat(std::get<Rat>(a.payload) * std::get<Rat>(b.payload))};
    case Carrier::F64:
      return {carrier, std::get<double>(a.payload) * std::get<double>(b.payload)};
    case Carrier::Complex:
      return {carrier,
              std::get<std::complex<double>>(a.payload) * std::get<std::complex<double>>(b.payload)};
    case Carrier::MaxProd:
      return {carrier, Rat(std::get<Rat>(a.payload) * std::get<Rat>(b.payload))};
    case Carrier::MinPlus:
      return {carrier, ext_add(std::get<ExtRat>(a.payload), std::get<ExtRat>(b.payload))};
    case Carrier::Set: {
      SetVal r = std::get<SetVal>(a.payload);
      const SetVal& s = std::get<SetVal>(b.payload);
      for (size_t i = 0; i < r.words.size(); i++) r.words[i] &= s.words[i];
      return {carrier, r};
    }
    case Carrier::Avg: {
      const AvgPair& x = std::get<AvgPair>(a.payload);
      const AvgPair& y = std::get<AvgPair>(b.payload);
      return {carrier, AvgPair{x.sum * y.sum, x.cnt * y.cnt}};
    }
    case Carrier::Unique:
      return {carrier, cap2(long(std::get<uint8_t>(a.payload)) * std::get<uint8_t>(b.payload))};
    case Carrier::MaxTimes:
      return {carrier, mt_times(std::get<MaxTimesVal>(a.payload), std::get<MaxTimesVal>(b.payload))};
  }
  fail_internal("unhandled carrier");
}

SemiringValue SemiringSpec::power(const SemiringValue& a, uint64_t k, uint64_t* mult_count) const {
  if (k == 0) fail_user("power exponent must be >= 1");
  if (is_idempotent(a)) return a;
  int msb = 63;
  while (((k >> msb) & 1) == 0) msb--;
  SemiringValue r = a;
  for (int i = msb - 1; i >= 0; i--) {
    r = times(r, r);
    if (mult_count) (*mult_count)++;
    if ((k >> i) & 1) {
      r = times(r, a);
      if (mult_count) (*mult_count)++;
    }
  }
  return r;
}

bool SemiringSpec::is_idempotent(const SemiringValue& a) const { return times(a, a) == a; }

bool SemiringSpec::approx_equal(const SemiringValue& a, const SemiringValue& b,
                                double rel_tol) const {
  check_tag(*this, a);
  check_tag(*this, b);
  if (carrier == Carrier::F64) {
    double x = std::get<double>(a.payload), y = std::get<double>(b.payload);
    return std::fabs(x - y) <= rel_tol * std::max({1.0, std::fabs(x), std::fabs(y)});
  }
  if (carrier == Carrier::Complex) {
    auto x = std::get<std::complex<double>>(a.payload);
    auto y = std::get<std::complex<double>>(b.payload);
    return std::abs(x - y) <= rel_tol * std::max({1.0, std::abs(x), std::abs(y)});
  }
  return a == b;
}

namespace {

double parse_double(std::string_view s) {
  std::string str(s);
  size_t pos = 0;
  double v;
  try {
    v = std::stod(str, &pos);
  } catch (const std::exception&) {
    fail_user("bad float literal: '" + str + "'");
  }
  if (pos != str.size()) fail_user("bad float literal: '" + str + "'");
  return v;
}

std::string print_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::complex<double> parse_complex(std::string_view s) {
  if (s.empty()) fail_user("empty complex literal");
  if (s.back() != 'i') return {parse_double(s), 0.0};
  std::string_view body = s.substr(0, s.size() - 1);
  // Split at the last +/- that does not follow an exponent marker.
  for (size_t i = body.size(); i-- > 1;) {
    char c = body[i];
    if ((c == '+' || c == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      double re = parse_double(body.substr(0, i));
      std::string_view im = body.substr(i);
      if (im == "+") return {re, 1.0};
      if (im == "-") return {re, -1.0};
      return {re, parse_double(im)};
    }
  }
  return {0.0, parse_double(body)};
}

}  // namespace

SemiringValue SemiringSpec::parse_value(std::string_view text) const {
  switch (carrier) {
    case Carrier::Bool: {
      if (text == "true") return {carrier, true};
      if (text == "false") return {carrier, false};
      fail_user("bad bool literal: '" + std::string(text) + "' (want true/false)");
    }
    case Carrier::Nat: {
      Int z = int_from_string(text);
      if (z < 0) fail_user("nat value must be non-negative: '" + std::string(text) + "'");
      return {carrier, z};
    }
    case Carrier::Rational:
      return {carrier, rat_from_string(text)};
    case Carrier::F64:
      return {carrier, parse_double(text)};
    case Carrier::Complex:
      return {carrier, parse_complex(text)};
    case Carrier::MaxProd: {
      Rat r = rat_from_string(text);
      if (r < 0) fail_user("maxprod value must be non-negative: '" + std::string(text) + "'");
      return {carrier, r};
    }
    case Carrier::MinPlus: {
      if (text == "inf") return {carrier, ExtRat::infinity()};
      return {carrier, ExtRat(rat_from_string(text))};
    }
    case Carrier::Set: {
      SetVal s = SetVal::empty(set_universe);
      if (text.empty() || text == "{}") return {carrier, s};
      size_t start = 0;
      while (start <= text.size()) {
        size_t comma = text.find(',', start);
        std::string_view item =
            text.substr(start, comma == std::string_view::npos ? text.size() - start : comma - start);
        Int z = int_from_string(item);
        if (z < 0 || z >= set_universe)
          fail_user("set element out of universe: '" + std::string(item) + "'");
        s.insert(static_cast<uint32_t>(z.get_ui()));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
      }
      return {carrier, s};
    }
    case Carrier::Avg:
      return lift(Reduction::Avg, SemiringValue{Carrier::Rational, rat_from_string(text)});
    case Carrier::Unique: {
      if (text == "true") return lift(Reduction::Unique, SemiringValue{Carrier::Bool, true});
      if (text == "false") return lift(Reduction::Unique, SemiringValue{Carrier::Bool, false});
      fail_user("bad unique literal: '" + std::string(text) + "' (want true/false)");
    }
    case Carrier::MaxTimes:
      return lift(Reduction::MaxTimes, SemiringValue{Carrier::Rational, rat_from_string(text)});
  }
  fail_internal("unhandled carrier");
}

std::string SemiringSpec::print_value(const SemiringValue& a) const {
  check_tag(*this, a);
  switch (carrier) {
    case Carrier::Bool:
      return std::get<bool>(a.payload) ? "true" : "false";
    case Carrier::Nat:
      return int_to_string(std::get<Int>(a.payload));
    case Carrier::Rational:
    case Carrier::MaxProd:
      return rat_to_string(std::get<Rat>(a.payload));
    case Carrier::F64:
      return print_double(std::get<double>(a.payload));
    case Carrier::Complex: {
      auto c = std::get<std::complex<double>>(a.payload);
      char buf[140];
      std::snprintf(buf, sizeof buf, "%.17g%+.17gi", c.real(), c.imag());
      return buf;
    }
    case Carrier::MinPlus:
      return ext_to_string(std::get<ExtRat>(a.payload));
    case Carrier::Set: {
      const SetVal& s = std::get<SetVal>(a.payload);
      std::string out;
      for (uint32_t i = 0; i < s.universe; i++) {
        if (!s.contains(i)) continue;
        if (!out.empty()) out += ',';
        out += std::to_string(i);
      }
      return out;
    }
    case Carrier::Avg: {
      const AvgPair& p = std::get<AvgPair>(a.payload);
      return rat_to_string(p.sum) + "|" + int_to_string(p.cnt);
    }
    case Carrier::Unique:
      return std::to_string(int(std::get<uint8_t>(a.payload)));
    case Carrier::MaxTimes: {
      const MaxTimesVal& v = std::get<MaxTimesVal>(a.payload);
      if (v.nan) return "nan";
      return "[" + rat_to_string(v.lo) + "," + rat_to_string(v.hi) + "]";
    }
  }
  fail_internal("unhandled carrier");
}

std::string SemiringSpec::name() const {
  switch (carrier) {
    case Carrier::Bool: return "bool";
    case Carrier::Nat: return "nat";
    case Carrier::Rational: return "rat";
    case Carrier::F64: return "f64";
    case Carrier::Complex: return "complex";
    case Carrier::MaxProd: return "maxprod";
    case Carrier::MinPlus: return "minplus";
    case Carrier::Set: return "set:" + std::to_string(set_universe);
    case Carrier::Avg: return "avg";
    case Carrier::Unique: return "unique";
    case Carrier::MaxTimes: return "maxtimes";
  }
  fail_internal("unhandled carrier");
}

SemiringSpec SemiringSpec::named(std::string_view dsl_name) {
  SemiringSpec s;
  if (dsl_name == "bool") {
    s.carrier = Carrier::Bool;
    s.plus_ops = {OpId::Or};
  } else if (dsl_name == "nat") {
    s.carrier = Carrier::Nat;
    s.plus_ops = {OpId::Sum, OpId::Max};
  } else if (dsl_name == "rat") {
    s.carrier = Carrier::Rational;
    s.plus_ops = {OpId::Sum, OpId::Max};
  } else if (dsl_name == "f64") {
    s.carrier = Carrier::F64;
    s.plus_ops = {OpId::Sum, OpId::Max};
  } else if (dsl_name == "complex") {
    s.carrier = Carrier::Complex;
    s.plus_ops = {OpId::Sum};
  } else if (dsl_name == "maxprod") {
    s.carrier = Carrier::MaxProd;
    s.plus_ops = {OpId::Max};
  } else if (dsl_name == "minplus") {
    s.carrier = Carrier::MinPlus;
    s.plus_ops = {OpId::Min};
  } else if (dsl_name.rfind("set:", 0) == 0) {
    s.carrier = Carrier::Set;
    Int u = int_from_string(dsl_name.substr(4));
    if (u < 1 || u > 4096) fail_user("set universe must be in [1, 4096]");
    s.set_universe = static_cast<uint32_t>(u.get_ui());
    s.plus_ops = {OpId::Union};
  } else if (dsl_name == "avg") {
    s.carrier = Carrier::Avg;
    s.plus_ops = {OpId::Sum};
  } else if (dsl_name == "unique") {
    s.carrier = Carrier::Unique;
    s.plus_ops = {OpId::Sum};
  } else if (dsl_name == "maxtimes") {
    s.carrier = Carrier::MaxTimes;
    s.plus_ops = {OpId::Max};
  } else {
    fail_user("unknown semiring name: '" + std::string(dsl_name) + "'");
  }
  return s;
}

SemiringValue lift(Reduction kind, const SemiringValue& base) {
  switch (kind) {
    case Reduction::Avg: {
      if (base.tag != Carrier::Rational) fail_user("avg lifts rational values");
      const Rat& x = std::get<Rat>(base.payload);
      return {Carrier::Avg, AvgPair{x, Int(x != 0 ? 1 : 0)}};
    }
    case Reduction::Unique: {
      if (base.tag != Carrier::Bool) fail_user("unique lifts boolean values");
      return {Carrier::Unique, uint8_t(std::get<bool>(base.payload) ? 1 : 0)};
    }
    case Reduction::MaxTimes: {
      if (base.tag != Carrier::Rational) fail_user("maxtimes lifts rational values");
      const Rat& x = std::get<Rat>(base.payload);
      return {Carrier::MaxTimes, MaxTimesVal{false, x, x}};
    }
  }
  fail_internal("unhandled reduction");
}

SemiringValue lower(Reduction kind, const SemiringValue& lifted) {
  switch (kind) {
    case Reduction::Avg: {
      if (lifted.tag != Carrier::Avg) fail_user("lower(avg) expects an avg pair");
      const AvgPair& p = std::get<AvgPair>(lifted.payload);
      if (p.cnt == 0) return {Carrier::Rational, Rat(0)};
      Rat r = p.sum / Rat(p.cnt);
      r.canonicalize();
      return {Carrier::Rational, r};
    }
    case Reduction::Unique: {
      if (lifted.tag != Carrier::Unique) fail_user("lower(unique) expects a ternary value");
      return {Carrier::Bool, std::get<uint8_t>(lifted.payload) == 1};
    }
    case Reduction::MaxTimes: {
      if (lifted.tag != Carrier::MaxTimes) fail_user("lower(maxtimes) expects an interval");
      const MaxTimesVal& v = std::get<MaxTimesVal>(lifted.payload);
      if (v.nan) fail_internal("lowering the max-times NaN pair (the absent value)");
      return {Carrier::Rational, v.hi};
    }
  }
  fail_internal("unhandled reduction");
}

std::optional<Reduction> carrier_reduction(Carrier c) {
  switch (c) {
    case Carrier::Avg: return Reduction::Avg;
    case Carrier::Unique: return Reduction::Unique;
    case Carrier::MaxTimes: return Reduction::MaxTimes;
    default: return std::nullopt;
  }
}

Carrier reduction_base_carrier(Reduction kind) {
  switch (kind) {
    case Reduction::Avg: return Carrier::Rational;
    case Reduction::Unique: return Carrier::Bool;
    case Reduction::MaxTimes: return Carrier::Rational;
  }
  fail_internal("unhandled reduction");
}

}  // namespace faq
