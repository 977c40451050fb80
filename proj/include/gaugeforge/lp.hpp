#pragma once

// Small dense two-phase tableau simplex with Bland's rule. Works in both
// scalar kingdoms: pivots are exact over rationals and thresholded over
// doubles.
//
//   minimize  c . x   subject to  A_eq x = b_eq,  A_le x <= b_le,  x >= 0

#include <cmath>
#include <limits>
#include <vector>

#include "gaugeforge/scalar.hpp"

namespace gaugeforge {

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::iteration_limit: return "iteration-limit";
  }
  return "?";
}

template <class S>
struct LinearProgram {
  std::vector<S> cost;
  std::vector<std::vector<S>> a_eq;
  std::vector<S> b_eq;
  std::vector<std::vector<S>> a_le;
  std::vector<S> b_le;
};

template <class S>
struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  std::vector<S> x;
  S objective{0};
  int iterations = 0;
};

struct LpOptions {
  double feasibility_tol = 1e-9;  // floating kingdom only
  double optimality_tol = 1e-11;
  double pivot_tol = 1e-11;
  int max_iterations = 200000;
};

namespace detail {

template <class S>
class Tableau {
 public:
  Tableau(int rows, int cols) : rows_(rows), cols_(cols), t_(std::size_t(rows + 1) * (cols + 1), S(0)) {}

  S& at(int i, int j) { return t_[std::size_t(i) * (cols_ + 1) + j]; }
  S& rhs(int i) { return at(i, cols_); }
  S& obj(int j) { return at(rows_, j); }

  void pivot(int r, int c) {
    S inv = S(1) / at(r, c);
    for (int j = 0; j <= cols_; ++j) at(r, j) *= inv;
    at(r, c) = S(1);
    for (int i = 0; i <= rows_; ++i) {
      if (i == r) continue;
      S f = at(i, c);
      if (ScalarTraits<S>::is_zero(f)) continue;
      for (int j = 0; j <= cols_; ++j) {
        if (ScalarTraits<S>::is_zero(at(r, j))) continue;
        at(i, j) -= f * at(r, j);
      }
      at(i, c) = S(0);
    }
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

 private:
  int rows_, cols_;
  std::vector<S> t_;
};

template <class S>
bool negative(const S& x, double tol) {
  if constexpr (ScalarTraits<S>::exact) return sgn(x) < 0;
  else return x < -tol;
}

template <class S>
bool positive(const S& x, double tol) {
  if constexpr (ScalarTraits<S>::exact) return sgn(x) > 0;
  else return x > tol;
}

// Runs Bland-rule iterations on the objective row restricted to columns
// where allowed[j] is true.
template <class S>
LpStatus iterate(Tableau<S>& tab, std::vector<int>& basis, const std::vector<bool>& allowed,
                 const LpOptions& opt, int& iterations) {
  int m = tab.rows(), n = tab.cols();
  while (true) {
    if (iterations >= opt.max_iterations) return LpStatus::iteration_limit;
    int enter = -1;
    for (int j = 0; j < n; ++j)
      if (allowed[j] && negative(tab.obj(j), opt.optimality_tol)) {
        enter = j;
        break;
      }
    if (enter < 0) return LpStatus::optimal;
    int leave = -1;
    S best_ratio(0);
    for (int i = 0; i < m; ++i) {
      if (!positive(tab.at(i, enter), opt.pivot_tol)) continue;
      S ratio = tab.rhs(i) / tab.at(i, enter);
      if (leave < 0 || ratio < best_ratio || (ratio == best_ratio && basis[i] < basis[leave])) {
        if constexpr (!ScalarTraits<S>::exact) {
          if (leave >= 0 && !(ratio < best_ratio) && basis[i] >= basis[leave]) continue;
        }
        leave = i;
        best_ratio = ratio;
      }
    }
    if (leave < 0) return LpStatus::unbounded;
    tab.pivot(leave, enter);
    basis[leave] = enter;
    ++iterations;
  }
}

}  // namespace detail

template <class S>
LpSolution<S> solve_lp(const LinearProgram<S>& lp, const LpOptions& opt = {}) {
  const int nvar = static_cast<int>(lp.cost.size());
  const int meq = static_cast<int>(lp.a_eq.size());
  const int mle = static_cast<int>(lp.a_le.size());
  const int m = meq + mle;
  // Columns: original | slacks | artificials.
  const int slack0 = nvar, art0 = nvar + mle, ncols = nvar + mle + m;
  detail::Tableau<S> tab(m, ncols);
  for (int i = 0; i < m; ++i) {
    const auto& row = i < meq ? lp.a_eq[i] : lp.a_le[i - meq];
    S b = i < meq ? lp.b_eq[i] : lp.b_le[i - meq];
    if (static_cast<int>(row.size()) != nvar) throw ArgumentError("LP row length mismatch");
    bool flip = sign_of(b) < 0;
    for (int j = 0; j < nvar; ++j) tab.at(i, j) = flip ? S(-row[j]) : row[j];
    if (i >= meq) tab.at(i, slack0 + (i - meq)) = flip ? S(-1) : S(1);
    tab.at(i, art0 + i) = S(1);
    tab.rhs(i) = flip ? S(-b) : b;
  }
  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) basis[i] = art0 + i;

  // Phase 1: minimize the sum of artificials.
  for (int j = 0; j <= ncols; ++j) {
    S s(0);
    if (j < art0 || j == ncols)
      for (int i = 0; i < m; ++i) s -= tab.at(i, j);
    tab.obj(j) = s;
  }
  LpSolution<S> sol;
  std::vector<bool> allowed(ncols, true);
  LpStatus st = detail::iterate(tab, basis, allowed, opt, sol.iterations);
  if (st == LpStatus::iteration_limit) {
    sol.status = st;
    return sol;
  }
  S infeas = -tab.obj(ncols);
  if (detail::positive(infeas, opt.feasibility_tol)) {
    sol.status = LpStatus::infeasible;
    return sol;
  }
  // Drive remaining artificials out of the basis.
  std::vector<bool> dropped(m, false);
  for (int i = 0; i < m; ++i) {
    if (basis[i] < art0) continue;
    int c = -1;
    double best = 0.0;
    for (int j = 0; j < art0; ++j) {
      double mag = std::fabs(to_double(tab.at(i, j)));
      if constexpr (ScalarTraits<S>::exact) {
        if (sgn(tab.at(i, j)) != 0) {
          c = j;
          break;
        }
      } else if (mag > std::max(best, 1e-9)) {
        best = mag;
        c = j;
      }
    }
    if (c >= 0) {
      tab.pivot(i, c);
      basis[i] = c;
    } else {
      dropped[i] = true;
    }
  }
  for (int j = art0; j < ncols; ++j) allowed[j] = false;

  // Phase 2 objective row: reduced costs of the real objective.
  for (int j = 0; j <= ncols; ++j) tab.obj(j) = (j < nvar) ? lp.cost[j] : S(0);
  for (int i = 0; i < m; ++i) {
    if (dropped[i]) continue;
    int b = basis[i];
    S cb = b < nvar ? lp.cost[b] : S(0);
    if (ScalarTraits<S>::is_zero(cb)) continue;
    for (int j = 0; j <= ncols; ++j) tab.obj(j) -= cb * tab.at(i, j);
  }
  // Rows whose artificial could not leave are redundant; freeze them by
  // marking every structural pivot in them as already zero.
  for (int i = 0; i < m; ++i)
    if (dropped[i])
      for (int j = 0; j <= ncols; ++j) tab.at(i, j) = S(0);

  st = detail::iterate(tab, basis, allowed, opt, sol.iterations);
  sol.status = st;
  if (st != LpStatus::optimal) return sol;
  sol.x.assign(nvar, S(0));
  for (int i = 0; i < m; ++i) {
    if (dropped[i] || basis[i] >= nvar) continue;
    S v = tab.rhs(i);
    if constexpr (!ScalarTraits<S>::exact) {
      if (v < 0) v = 0;
    }
    sol.x[basis[i]] = v;
  }
  S objective(0);
  for (int j = 0; j < nvar; ++j) objective += lp.cost[j] * sol.x[j];
  sol.objective = objective;
  return sol;
}

}  // namespace gaugeforge
