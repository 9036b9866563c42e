#include "uinfo/simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace uinfo {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kFeasTol = 1e-9;

// Tableau with n real columns, m artificial columns and one rhs column.
struct Tableau {
  std::size_t m, n;
  std::vector<double> t;       // m rows x (n + m + 1)
  std::vector<double> cost;    // reduced cost row, n + m + 1 entries
  std::vector<std::size_t> basis;
  std::vector<bool> active_row;

  std::size_t width() const { return n + m + 1; }
  double& at(std::size_t i, std::size_t j) { return t[i * width() + j]; }
  double at(std::size_t i, std::size_t j) const { return t[i * width() + j]; }
  double& rhs(std::size_t i) { return t[i * width() + n + m]; }

  void pivot(std::size_t prow, std::size_t pcol) {
    const double inv = 1.0 / at(prow, pcol);
    for (std::size_t j = 0; j < width(); ++j) at(prow, j) *= inv;
    at(prow, pcol) = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == prow) continue;
      const double f = at(i, pcol);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < width(); ++j) at(i, j) -= f * at(prow, j);
      at(i, pcol) = 0.0;
    }
    const double f = cost[pcol];
    if (f != 0.0) {
      for (std::size_t j = 0; j < width(); ++j) cost[j] -= f * at(prow, j);
      cost[pcol] = 0.0;
    }
    basis[prow] = pcol;
  }

  // Bland's rule over the allowed column range; returns width() when optimal.
  std::size_t entering(std::size_t max_col) const {
    for (std::size_t j = 0; j < max_col; ++j)
      if (cost[j] < -kPivotTol) return j;
    return width();
  }

  // Min-ratio row; ties resolved by lowest basic variable index.
  std::size_t leaving(std::size_t col) const {
    std::size_t best = m;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      if (!active_row[i]) continue;
      const double a = at(i, col);
      if (a <= kPivotTol) continue;
      const double ratio = t[i * width() + n + m] / a;
      if (ratio < best_ratio - 1e-14 ||
          (ratio < best_ratio + 1e-14 && (best == m || basis[i] < basis[best]))) {
        best_ratio = ratio;
        best = i;
      }
    }
    return best;
  }
};

}  // namespace

LpResult solve_equality_lp(std::size_t m, std::size_t n, std::vector<double> A,
                           std::vector<double> b, std::vector<double> c) {
  if (A.size() != m * n || b.size() != m || c.size() != n)
    throw std::invalid_argument("solve_equality_lp: shape mismatch");

  Tableau tb;
  tb.m = m;
  tb.n = n;
  tb.t.assign(m * (n + m + 1), 0.0);
  tb.basis.resize(m);
  tb.active_row.assign(m, true);
  for (std::size_t i = 0; i < m; ++i) {
    const double sign = b[i] < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) tb.at(i, j) = sign * A[i * n + j];
    tb.at(i, n + i) = 1.0;
    tb.rhs(i) = sign * b[i];
    tb.basis[i] = n + i;
  }

  // Phase I: minimize the sum of artificials. Reduced costs of the artificial
  // basis are zeroed by subtracting every row from the cost row.
  tb.cost.assign(n + m + 1, 0.0);
  for (std::size_t j = n; j < n + m; ++j) tb.cost[j] = 1.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < tb.width(); ++j)
      if (j < n || j == n + m) tb.cost[j] -= tb.at(i, j);

  const std::size_t iter_cap = 2000 * (m + n) + 10000;
  std::size_t iters = 0;
  for (;;) {
    const std::size_t col = tb.entering(n);
    if (col == tb.width()) break;
    const std::size_t row = tb.leaving(col);
    if (row == m) break;  // phase-I objective is bounded; numerically stuck
    tb.pivot(row, col);
    if (++iters > iter_cap) throw std::logic_error("simplex: phase I did not terminate");
  }
  const double phase1 = -tb.cost[n + m];

  LpResult res;
  res.infeasibility = std::max(0.0, phase1);
  if (phase1 > kFeasTol) {
    res.status = LpStatus::Infeasible;
    return res;
  }

  // Drive leftover artificials out of the basis; rows that cannot pivot on a
  // real column are redundant and go inactive.
  for (std::size_t i = 0; i < m; ++i) {
    if (tb.basis[i] < n) continue;
    std::size_t col = tb.width();
    for (std::size_t j = 0; j < n; ++j)
      if (std::abs(tb.at(i, j)) > 1e-9) { col = j; break; }
    if (col == tb.width()) {
      tb.active_row[i] = false;
      continue;
    }
    tb.pivot(i, col);
  }

  // Phase II.
  tb.cost.assign(n + m + 1, 0.0);
  for (std::size_t j = 0; j < n; ++j) tb.cost[j] = c[j];
  for (std::size_t i = 0; i < m; ++i) {
    if (tb.basis[i] >= n) continue;
    const double f = tb.cost[tb.basis[i]];
    if (f == 0.0) continue;
    for (std::size_t j = 0; j < tb.width(); ++j) tb.cost[j] -= f * tb.at(i, j);
    tb.cost[tb.basis[i]] = 0.0;
  }
  iters = 0;
  for (;;) {
    const std::size_t col = tb.entering(n);
    if (col == tb.width()) break;
    const std::size_t row = tb.leaving(col);
    if (row == m) {
      res.status = LpStatus::Unbounded;
      return res;
    }
    tb.pivot(row, col);
    if (++iters > iter_cap) throw std::logic_error("simplex: phase II did not terminate");
  }

  res.status = LpStatus::Optimal;
  res.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    if (tb.basis[i] < n) res.x[tb.basis[i]] = std::max(0.0, tb.rhs(i));
  res.objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) res.objective += c[j] * res.x[j];
  return res;
}

std::vector<double> solve_transportation(std::size_t rows, std::size_t cols,
                                         const std::vector<double>& cost,
                                         const std::vector<double>& row_sums,
                                         const std::vector<double>& col_sums) {
  if (cost.size() != rows * cols || row_sums.size() != rows || col_sums.size() != cols)
    throw std::invalid_argument("solve_transportation: shape mismatch");
  double sr = 0.0, sc = 0.0;
  for (double v : row_sums) sr += v;
  for (double v : col_sums) sc += v;
  if (std::abs(sr - sc) > 1e-9)
    throw std::invalid_argument("solve_transportation: row and column totals differ");

  const std::size_t m = rows + cols;
  const std::size_t n = rows * cols;
  std::vector<double> A(m * n, 0.0), b(m);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t cc = 0; cc < cols; ++cc) A[r * n + r * cols + cc] = 1.0;
    b[r] = row_sums[r];
  }
  for (std::size_t cc = 0; cc < cols; ++cc) {
    for (std::size_t r = 0; r < rows; ++r) A[(rows + cc) * n + r * cols + cc] = 1.0;
    b[rows + cc] = col_sums[cc];
  }
  const LpResult res = solve_equality_lp(m, n, std::move(A), std::move(b), cost);
  if (res.status != LpStatus::Optimal)
    throw std::logic_error("solve_transportation: consistent instance reported non-optimal");
  return res.x;
}

}  // namespace uinfo
