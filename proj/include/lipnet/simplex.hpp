#pragma once

#include <vector>

namespace lipnet {

enum class Sense { less_equal, greater_equal, equal };

/// minimize c^T x  subject to  rows,  x >= 0.
struct LinearProgram {
  struct Row {
    std::vector<double> coeffs;
    Sense sense = Sense::less_equal;
    double rhs = 0.0;
  };

  std::vector<double> objective;
  std::vector<Row> rows;
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  std::vector<double> x;
  double objective = 0.0;
  long pivots = 0;
};

/// Dense two-phase tableau simplex; Dantzig pricing with a Bland fallback on degenerate runs.
LpSolution solve_lp(const LinearProgram& lp, double tol = 1e-10, long max_pivots = 200000);

}  // namespace lipnet
