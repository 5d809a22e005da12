#include "followsim/hungarian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace followsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Jonker-Volgenant style shortest augmenting path solver on a square
// matrix. Returns the minimal total cost.
double solve_square(const std::vector<std::vector<double>>& a) {
  const int n = static_cast<int>(a.size());
  if (n == 0) return 0.0;
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = 0;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  double total = 0.0;
  for (int j = 1; j <= n; ++j) {
    if (p[j]) total += a[p[j] - 1][j - 1];
  }
  return total;
}

// Min cost of assigning min(|rows|, |cols|) pairs within the given
// row/col index subsets. Dummy rows or columns pad at zero cost, so the
// returned total is the sum over real pairs only.
double solve_subset(const std::vector<std::vector<double>>& cost, const std::vector<int>& rows,
                    const std::vector<int>& cols) {
  const int p = static_cast<int>(rows.size());
  const int q = static_cast<int>(cols.size());
  if (p == 0 || q == 0) return 0.0;
  const int s = std::max(p, q);
  std::vector<std::vector<double>> a(s, std::vector<double>(s, 0.0));
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < q; ++j) {
      a[i][j] = cost[rows[i]][cols[j]];
    }
  }
  return solve_square(a);
}

}  // namespace

double assignment_cost(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  const int m = n > 0 ? static_cast<int>(cost[0].size()) : 0;
  if (n == 0 || m == 0) return 0.0;
  std::vector<int> rows(n), cols(m);
  std::iota(rows.begin(), rows.end(), 0);
  std::iota(cols.begin(), cols.end(), 0);
  return solve_subset(cost, rows, cols);
}

std::vector<std::pair<int, int>> hungarian(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  const int m = n > 0 ? static_cast<int>(cost[0].size()) : 0;
  std::vector<std::pair<int, int>> pairs;
  const int k = std::min(n, m);
  if (k == 0) return pairs;

  double max_abs = 1.0;
  for (const auto& row : cost) {
    for (double x : row) max_abs = std::max(max_abs, std::abs(x));
  }
  const double tol = 1e-9 * max_abs;

  std::vector<int> rows(n), cols(m);
  std::iota(rows.begin(), rows.end(), 0);
  std::iota(cols.begin(), cols.end(), 0);
  const double best_total = solve_subset(cost, rows, cols);

  // Fix pairs one at a time: the next pair is the smallest (row, col)
  // whose choice still completes to an optimal assignment. Skipping a row
  // is only possible when more rows than pairs remain.
  double fixed = 0.0;
  int need = k;
  std::vector<int> rows_left = rows;
  std::vector<int> cols_left = cols;
  while (need > 0) {
    bool placed = false;
    // Rows past this bound leave fewer than need-1 rows for the remainder.
    const std::size_t last_ri = rows_left.size() - static_cast<std::size_t>(need);
    for (std::size_t ri = 0; ri <= last_ri && !placed; ++ri) {
      const int r = rows_left[ri];
      const std::vector<int> rows_after(rows_left.begin() + ri + 1, rows_left.end());
      for (std::size_t ci = 0; ci < cols_left.size(); ++ci) {
        const int c = cols_left[ci];
        std::vector<int> cols_rest;
        cols_rest.reserve(cols_left.size() - 1);
        for (int cc : cols_left) {
          if (cc != c) cols_rest.push_back(cc);
        }
        const double completion = solve_subset(cost, rows_after, cols_rest);
        if (fixed + cost[r][c] + completion <= best_total + tol) {
          pairs.emplace_back(r, c);
          fixed += cost[r][c];
          rows_left.assign(rows_after.begin(), rows_after.end());
          cols_left = std::move(cols_rest);
          --need;
          placed = true;
          break;
        }
      }
    }
    if (!placed) {
      // Numerical fallback: take the cheapest certified continuation.
      double best = kInf;
      std::pair<int, int> pick{-1, -1};
      std::vector<int> pick_rows, pick_cols;
      for (std::size_t ri = 0; ri < rows_left.size(); ++ri) {
        const int r = rows_left[ri];
        std::vector<int> rows_after(rows_left.begin() + ri + 1, rows_left.end());
        if (static_cast<int>(rows_after.size()) < need - 1) continue;
        for (int c : cols_left) {
          std::vector<int> cols_rest;
          for (int cc : cols_left) {
            if (cc != c) cols_rest.push_back(cc);
          }
          const double total = fixed + cost[r][c] + solve_subset(cost, rows_after, cols_rest);
          if (total < best) {
            best = total;
            pick = {r, c};
            pick_rows = rows_after;
            pick_cols = cols_rest;
          }
        }
      }
      pairs.push_back(pick);
      fixed += cost[pick.first][pick.second];
      rows_left = std::move(pick_rows);
      cols_left = std::move(pick_cols);
      --need;
    }
  }
  return pairs;
}

}  // namespace followsim
