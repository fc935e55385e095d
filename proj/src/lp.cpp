#include "faq/lp.hpp"

#include "faq/error.hpp"

namespace faq {

namespace {

template <typename T>
struct Num;

template <>
struct Num<Rat> {
  static bool pos(const Rat& x) { return x > 0; }
  static bool less(const Rat& a, const Rat& b) { return a < b; }
  static bool eq(const Rat& a, const Rat& b) { return a == b; }
};

template <>
struct Num<double> {
  static constexpr double eps = 1e-9;
  static bool pos(double x) { return x > eps; }
  static bool less(double a, double b) { return a < b - 1e-12; }
  static bool eq(double a, double b) {
    return a <= b + 1e-12 && b <= a + 1e-12;
  }
};

// max c·x subject to Ax ≤ b, x ≥ 0, with b ≥ 0 so the slack basis starts
// feasible. Bland's rule on both pivots, so the exact variant never cycles.
template <typename T>
LpResult<T> solve(const std::vector<std::vector<T>>& a,
                  const std::vector<T>& b, const std::vector<T>& c) {
  size_t m = a.size(), n = c.size();
  require(b.size() == m, ErrKind::Internal, "lp shape mismatch");
  for (const auto& row : a)
    require(row.size() == n, ErrKind::Internal, "lp shape mismatch");
  for (const auto& bi : b)
    require(!(bi < T(0)), ErrKind::Internal, "lp needs nonnegative rhs");

  size_t cols = n + m + 1;
  std::vector<std::vector<T>> t(m + 1, std::vector<T>(cols, T(0)));
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = 0; j < n; ++j) t[i][j] = a[i][j];
    t[i][n + i] = T(1);
    t[i][cols - 1] = b[i];
  }
  for (size_t j = 0; j < n; ++j) t[m][j] = c[j];
  std::vector<int> basis(m);
  for (size_t i = 0; i < m; ++i) basis[i] = int(n + i);

  for (;;) {
    int enter = -1;
    for (size_t j = 0; j < n + m; ++j)
      if (Num<T>::pos(t[m][j])) {
        enter = int(j);
        break;
      }
    if (enter < 0) break;

    int leave = -1;
    T best{};
    for (size_t i = 0; i < m; ++i) {
      if (!Num<T>::pos(t[i][enter])) continue;
      T ratio = t[i][cols - 1] / t[i][enter];
      if (leave < 0 || Num<T>::less(ratio, best) ||
          (Num<T>::eq(ratio, best) && basis[i] < basis[leave])) {
        leave = int(i);
        best = ratio;
      }
    }
    if (leave < 0) {
      LpResult<T> r;
      r.unbounded = true;
      return r;
    }

    T piv = t[leave][enter];
    for (size_t j = 0; j < cols; ++j) t[leave][j] /= piv;
    for (size_t i = 0; i <= m; ++i) {
      if (int(i) == leave) continue;
      T f = t[i][enter];
      if (Num<T>::eq(f, T(0))) continue;
      for (size_t j = 0; j < cols; ++j) t[i][j] -= f * t[leave][j];
    }
    basis[leave] = enter;
  }

  LpResult<T> r;
  r.objective = T(0) - t[m][cols - 1];
  r.primal.assign(n, T(0));
  for (size_t i = 0; i < m; ++i)
    if (basis[i] < int(n)) r.primal[basis[i]] = t[i][cols - 1];
  r.dual.assign(m, T(0));
  for (size_t i = 0; i < m; ++i) r.dual[i] = T(0) - t[m][n + i];
  return r;
}

}  // namespace

LpResult<Rat> packing_lp_exact(const std::vector<std::vector<Rat>>& a,
                               const std::vector<Rat>& b,
                               const std::vector<Rat>& c) {
  return solve<Rat>(a, b, c);
}

LpResult<double> packing_lp_double(const std::vector<std::vector<double>>& a,
                                   const std::vector<double>& b,
                                   const std::vector<double>& c) {
  return solve<double>(a, b, c);
}

}  // namespace faq
