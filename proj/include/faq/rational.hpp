#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace faq {

using Int = mpz_class;
using Rat = mpq_class;

// Prints canonical "p" or "p/q".
std::string rat_to_string(const Rat& r);
std::string int_to_string(const Int& z);

// Accepts "p", "p/q", and decimal strings like "-0.25" (converted exactly).
Rat rat_from_string(std::string_view s);
Int int_from_string(std::string_view s);

// Rational extended with +infinity. Used as the min-plus carrier (where
// +inf is the additive identity) and as the "uncoverable" width value.
struct ExtRat {
  bool inf = false;
  Rat v;

  ExtRat() : inf(false), v(0) {}
  explicit ExtRat(Rat r) : inf(false), v(std::move(r)) {}
  static ExtRat infinity() {
    ExtRat e;
    e.inf = true;
    return e;
  }

  bool operator==(const ExtRat& o) const { return inf == o.inf && (inf || v == o.v); }
  bool operator!=(const ExtRat& o) const { return !(*this == o); }
  bool operator<(const ExtRat& o) const {
    if (inf) return false;
    if (o.inf) return true;
    return v < o.v;
  }
  bool operator<=(const ExtRat& o) const { return *this < o || *this == o; }
};

inline ExtRat ext_min(const ExtRat& a, const ExtRat& b) { return a < b ? a : b; }
inline ExtRat ext_max(const ExtRat& a, const ExtRat& b) { return a < b ? b : a; }
inline ExtRat ext_add(const ExtRat& a, const ExtRat& b) {
  if (a.inf || b.inf) return ExtRat::infinity();
  return ExtRat(a.v + b.v);
}

std::string ext_to_string(const ExtRat& e);

}  // namespace faq
