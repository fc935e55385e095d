#include "faq/rational.hpp"

#include <cctype>

#include "faq/error.hpp"

namespace faq {

std::string rat_to_string(const Rat& r) { return r.get_str(); }
std::string int_to_string(const Int& z) { return z.get_str(); }

Int int_from_string(std::string_view s) {
  if (s.empty()) fail_user("empty integer literal");
  Int z;
  if (z.set_str(std::string(s), 10) != 0) fail_user("bad integer literal: '" + std::string(s) + "'");
  return z;
}

Rat rat_from_string(std::string_view s) {
  if (s.empty()) fail_user("empty rational literal");
  auto slash = s.find('/');
  if (slash != std::string_view::npos) {
    Int num = int_from_string(s.substr(0, slash));
    Int den = int_from_string(s.substr(slash + 1));
    if (den == 0) fail_user("zero denominator in '" + std::string(s) + "'");
    Rat r(num, den);
    r.canonicalize();
    return r;
  }
  auto dot = s.find('.');
  if (dot == std::string_view::npos) return Rat(int_from_string(s));
  // Exact decimal: sign, integer part, fraction digits over a power of ten.
  std::string_view head = s.substr(0, dot);
  std::string_view frac = s.substr(dot + 1);
  bool neg = !head.empty() && head[0] == '-';
  if (!head.empty() && (head[0] == '-' || head[0] == '+')) head.remove_prefix(1);
  for (char c : frac)
    if (!std::isdigit(static_cast<unsigned char>(c))) fail_user("bad numeric literal: '" + std::string(s) + "'");
  Int ip = head.empty() ? Int(0) : int_from_string(head);
  Int scale = 1;
  Int fp = 0;
  for (char c : frac) {
    fp = fp * 10 + (c - '0');
    scale *= 10;
  }
  Rat r = Rat(ip) + Rat(fp, scale);
  if (neg) r = -r;
  r.canonicalize();
  return r;
}

std::string ext_to_string(const ExtRat& e) { return e.inf ? "inf" : rat_to_string(e.v); }

}  // namespace faq
