#pragma once

#include <vector>

#include "faq/rational.hpp"

namespace faq {

// Solution of max c·x subject to Ax ≤ b, x ≥ 0. `dual` holds the optimal
// multipliers on the rows, which for a covering/packing pair are the cover
// weights. When the program is unbounded only that flag is meaningful.
template <typename T>
struct LpResult {
  bool unbounded = false;
  T objective{};
  std::vector<T> primal;
  std::vector<T> dual;
};

// Dense simplex with Bland's rule from the slack basis; requires b ≥ 0.
// Exact-rational variant for widths, double variant (1e-9 pivot tolerance)
// for log-weighted objectives.
LpResult<Rat> packing_lp_exact(const std::vector<std::vector<Rat>>& a,
                               const std::vector<Rat>& b,
                               const std::vector<Rat>& c);
LpResult<double> packing_lp_double(const std::vector<std::vector<double>>& a,
                                   const std::vector<double>& b,
                                   const std::vector<double>& c);

}  // namespace faq
