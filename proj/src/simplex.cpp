#include "lipnet/simplex.hpp"

#include <cmath>
#include <limits>

namespace lipnet {
namespace {

constexpr double kPivotTol = 1e-9;

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_((rows + 1) * (cols + 1), 0.0) {}

  double& at(std::size_t r, std::size_t c) { return data_[r * (cols_ + 1) + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * (cols_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, cols_); }
  // Objective row is stored last.
  double& cost(std::size_t c) { return at(rows_, c); }
  double& cost_rhs() { return at(rows_, cols_); }

  void pivot(std::size_t pr, std::size_t pc) {
    const double p = at(pr, pc);
    for (std::size_t c = 0; c <= cols_; ++c) at(pr, c) /= p;
    for (std::size_t r = 0; r <= rows_; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c <= cols_; ++c) at(r, c) -= f * at(pr, c);
      at(r, pc) = 0.0;
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

// Runs the simplex method on the current objective row, restricted to the
// first `active_cols` columns. Dantzig's rule picks the entering column;
// after a run of degenerate pivots Bland's rule takes over until the
// objective moves again, which rules out cycling.
LpStatus iterate(Tableau& tab, std::vector<std::size_t>& basis, std::size_t active_cols, double tol, long& pivots,
                 long max_pivots) {
  int degenerate = 0;
  while (true) {
    const bool bland = degenerate > 50;
    std::size_t enter = active_cols;
    double most = -tol;
    for (std::size_t c = 0; c < active_cols; ++c) {
      if (tab.cost(c) < most) {
        enter = c;
        if (bland) break;
        most = tab.cost(c);
      }
    }
    if (enter == active_cols) return LpStatus::optimal;

    std::size_t leave = tab.rows();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < tab.rows(); ++r) {
      const double a = tab.at(r, enter);
      if (a <= kPivotTol) continue;
      const double ratio = tab.rhs(r) / a;
      const bool tie = std::abs(ratio - best) <= tol && leave < tab.rows();
      const bool better_tie = bland ? basis[r] < basis[leave] : a > tab.at(leave, enter);
      if (ratio < best - tol || (tie && better_tie)) {
        best = ratio;
        leave = r;
      }
    }
    if (leave == tab.rows()) return LpStatus::unbounded;
    degenerate = best <= tol ? degenerate + 1 : 0;
    tab.pivot(leave, enter);
    basis[leave] = enter;
    if (++pivots > max_pivots) return LpStatus::iteration_limit;
  }
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, double tol, long max_pivots) {
  const std::size_t n = lp.objective.size();
  const std::size_t m = lp.rows.size();

  std::size_t n_slack = 0;
  std::size_t n_art = 0;
  for (const auto& row : lp.rows) {
    Sense s = row.sense;
    if (row.rhs < 0) s = s == Sense::less_equal ? Sense::greater_equal : s == Sense::greater_equal ? Sense::less_equal : s;
    if (s != Sense::equal) ++n_slack;
    if (s != Sense::less_equal) ++n_art;
  }

  const std::size_t art_begin = n + n_slack;
  const std::size_t cols = art_begin + n_art;
  Tableau tab(m, cols);
  std::vector<std::size_t> basis(m);

  std::size_t slack = n;
  std::size_t art = art_begin;
  for (std::size_t r = 0; r < m; ++r) {
    const auto& row = lp.rows[r];
    const double sign = row.rhs < 0 ? -1.0 : 1.0;
    Sense s = row.sense;
    if (sign < 0) s = s == Sense::less_equal ? Sense::greater_equal : s == Sense::greater_equal ? Sense::less_equal : s;
    for (std::size_t c = 0; c < n && c < row.coeffs.size(); ++c) tab.at(r, c) = sign * row.coeffs[c];
    tab.rhs(r) = sign * row.rhs;
    if (s == Sense::less_equal) {
      tab.at(r, slack) = 1.0;
      basis[r] = slack++;
    } else {
      if (s == Sense::greater_equal) tab.at(r, slack++) = -1.0;
      tab.at(r, art) = 1.0;
      basis[r] = art++;
    }
  }

  LpSolution sol;
  long pivots = 0;

  // Phase 1: minimise the sum of artificials.
  if (n_art > 0) {
    for (std::size_t r = 0; r < m; ++r) {
      if (basis[r] < art_begin) continue;
      for (std::size_t c = 0; c <= cols; ++c) {
        if (c >= art_begin && c < cols) continue;
        tab.at(m, c) -= tab.at(r, c);
      }
    }
    const LpStatus st = iterate(tab, basis, cols, tol, pivots, max_pivots);
    if (st == LpStatus::iteration_limit) {
      sol.status = st;
      sol.pivots = pivots;
      return sol;
    }
    if (-tab.cost_rhs() > 1e3 * tol * (1.0 + m)) {
      sol.status = LpStatus::infeasible;
      sol.pivots = pivots;
      return sol;
    }
    // Drive zero-level artificials out of the basis where possible.
    for (std::size_t r = 0; r < m; ++r) {
      if (basis[r] < art_begin) continue;
      std::size_t best_c = art_begin;
      for (std::size_t c = 0; c < art_begin; ++c)
        if (std::abs(tab.at(r, c)) > kPivotTol && (best_c == art_begin || std::abs(tab.at(r, c)) > std::abs(tab.at(r, best_c))))
          best_c = c;
      if (best_c < art_begin) {
        tab.pivot(r, best_c);
        basis[r] = best_c;
      }
    }
  }

  // Phase 2 objective row expressed in terms of the current basis.
  for (std::size_t c = 0; c <= cols; ++c) tab.cost(c) = 0.0;
  for (std::size_t c = 0; c < n; ++c) tab.cost(c) = lp.objective[c];
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t b = basis[r];
    if (b >= n) continue;
    const double cb = lp.objective[b];
    if (cb == 0.0) continue;
    for (std::size_t c = 0; c <= cols; ++c) tab.cost(c) -= cb * tab.at(r, c);
  }

  const LpStatus st = iterate(tab, basis, art_begin, tol, pivots, max_pivots);
  sol.status = st;
  sol.pivots = pivots;
  sol.x.assign(n, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    if (basis[r] < n) sol.x[basis[r]] = tab.rhs(r);
  }
  sol.objective = 0.0;
  for (std::size_t c = 0; c < n; ++c) sol.objective += lp.objective[c] * sol.x[c];
  return sol;
}

}  // namespace lipnet
