#pragma once

#include <algorithm>
#include <limits>
#include <vector>

namespace radarmot {

/// Cost used for pairs that must never be chosen; large enough to lose against
/// any feasible assignment, small enough to keep the arithmetic exact.
inline constexpr double kUnmatchableCost = 1e15;

/// Minimum-cost assignment via shortest augmenting paths over row/column
/// potentials. Rectangular inputs are padded to square with zero-cost dummy
/// columns or rows. Costs must be finite. Returns row_to_col with -1 for rows
/// left unassigned (possible only when rows outnumber columns).
inline std::vector<int> solve_assignment(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  if (n == 0) return {};
  const int m = static_cast<int>(cost[0].size());
  if (m == 0) return std::vector<int>(n, -1);
  const int dim = std::max(n, m);
  const double inf = std::numeric_limits<double>::infinity();

  auto at = [&](int i, int j) { return (i < n && j < m) ? cost[i][j] : 0.0; };

  // 1-based potentials; column 0 is the virtual start of each augmenting path.
  std::vector<double> u(dim + 1, 0.0);
  std::vector<double> v(dim + 1, 0.0);
  std::vector<int> match_col(dim + 1, 0);  // row matched to each column
  std::vector<int> way(dim + 1, 0);

  for (int i = 1; i <= dim; ++i) {
    match_col[0] = i;
    int j0 = 0;
    std::vector<double> minv(dim + 1, inf);
    std::vector<char> used(dim + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match_col[j0];
      int j1 = 0;
      double delta = inf;
      for (int j = 1; j <= dim; ++j) {
        if (used[j]) continue;
        const double cur = at(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= dim; ++j) {
        if (used[j]) {
          u[match_col[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match_col[j0] != 0);
    do {
      const int j1 = way[j0];
      match_col[j0] = match_col[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= dim; ++j) {
    const int i = match_col[j];
    if (i >= 1 && i <= n && j <= m) {
      row_to_col[i - 1] = j - 1;
    }
  }
  return row_to_col;
}

/// Total cost of an assignment, summed in row order.
inline double assignment_cost(const std::vector<std::vector<double>>& cost,
                              const std::vector<int>& row_to_col) {
  double total = 0.0;
  for (std::size_t i = 0; i < row_to_col.size(); ++i) {
    if (row_to_col[i] >= 0) {
      total += cost[i][static_cast<std::size_t>(row_to_col[i])];
    }
  }
  return total;
}

}  // namespace radarmot
