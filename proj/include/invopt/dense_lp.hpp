#pragma once

// Dense two-phase primal simplex with Bland's anti-cycling rule.
//
//   maximize    c^T x
//   subject to  a_i^T x  (<= | >= | =)  b_i,   x >= 0
//
// Sized for the small dense problems this library produces (at most a few
// hundred rows); no sparsity, no presolve. Pivoting is fully deterministic.

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace invopt {

enum class RowSense { LessEqual, GreaterEqual, Equal };

struct LinearProgram {
  std::size_t num_vars = 0;
  std::vector<std::vector<double>> rows;
  std::vector<RowSense> senses;
  std::vector<double> rhs;
  std::vector<double> objective;  // maximized

  void add_row(std::vector<double> coeffs, RowSense sense, double b);
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> x;
  double objective = 0.0;
  /// Nonbasic columns at the final basis. Column j < num_vars is the
  /// structural variable x_j; num_vars + i is the slack (or surplus) of
  /// inequality row i. Equality rows carry no slack column.
  std::vector<std::size_t> nonbasic;
  std::size_t pivots = 0;
};

class LpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LpOptions {
  double pivot_tol = 1e-9;
  double feasibility_tol = 1e-9;
  std::size_t max_pivots = 200000;
};

LpSolution solve_lp(const LinearProgram& lp, const LpOptions& options = {});

}  // namespace invopt
