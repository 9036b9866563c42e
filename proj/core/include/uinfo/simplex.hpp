// Dense two-phase primal simplex for small equality-form LPs:
//   minimize c'x  subject to  A x = b, x >= 0.
// Pivot ties are broken by lowest index (Bland's rule), so the method
// terminates and is deterministic. Shared by the transportation subproblems
// of the UI solver and the Blackwell feasibility program.
#pragma once

#include <cstddef>
#include <vector>

namespace uinfo {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> x;
  double objective = 0.0;
  // Phase-I optimum (minimal total artificial mass); 0 for feasible programs.
  double infeasibility = 0.0;
};

// A is m x n row-major. b may have any signs; rows are normalized internally.
LpResult solve_equality_lp(std::size_t m, std::size_t n, std::vector<double> A,
                           std::vector<double> b, std::vector<double> c);

// Exact solution of  min <cost, x>  over the transportation polytope with the
// given row and column sums (which must agree within 1e-9). cost is
// rows x cols row-major; the result has the same layout.
std::vector<double> solve_transportation(std::size_t rows, std::size_t cols,
                                         const std::vector<double>& cost,
                                         const std::vector<double>& row_sums,
                                         const std::vector<double>& col_sums);

}  // namespace uinfo
