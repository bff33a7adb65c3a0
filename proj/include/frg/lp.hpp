#pragma once

// Dense two-phase simplex for small problems:
//   minimize c.x  subject to  A x <= b,  x >= 0.
// Bland's rule keeps it finite on degenerate problems.

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace frg::lp {

enum class Status { Optimal, Infeasible, Unbounded };

struct Result {
  Status status = Status::Infeasible;
  std::vector<double> x;
  double objective = 0;
};

inline Result minimize(const std::vector<double>& c, const std::vector<std::vector<double>>& a,
                       const std::vector<double>& b, double eps = 1e-9) {
  const std::size_t m = a.size();
  const std::size_t n = c.size();
  // Columns: n structural, m slacks, m artificials, then rhs.
  const std::size_t cols = n + 2 * m + 1;
  const std::size_t rhs = cols - 1;
  std::vector<std::vector<double>> t(m, std::vector<double>(cols, 0.0));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double sign = b[i] < 0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) t[i][j] = sign * a[i][j];
    t[i][n + i] = sign;
    t[i][rhs] = sign * b[i];
    if (sign > 0) {
      basis[i] = n + i;
    } else {
      t[i][n + m + i] = 1.0;
      basis[i] = n + m + i;
    }
  }

  auto pivot = [&](std::size_t r, std::size_t col) {
    const double p = t[r][col];
    for (double& v : t[r]) v /= p;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == r || t[i][col] == 0.0) continue;
      const double f = t[i][col];
      for (std::size_t j = 0; j < cols; ++j) t[i][j] -= f * t[r][j];
    }
    basis[r] = col;
  };

  // Runs the simplex for the given cost over the allowed columns; returns
  // false when unbounded.
  auto run = [&](const std::vector<double>& cost, std::size_t allowed) {
    for (;;) {
      std::size_t enter = cols;
      for (std::size_t j = 0; j < allowed; ++j) {
        double rc = cost[j];
        for (std::size_t i = 0; i < m; ++i) rc -= cost[basis[i]] * t[i][j];
        if (rc < -eps) {
          enter = j;
          break;
        }
      }
      if (enter == cols) return true;
      std::size_t leave = m;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m; ++i) {
        if (t[i][enter] <= eps) continue;
        const double ratio = t[i][rhs] / t[i][enter];
        if (ratio < best - eps || (std::abs(ratio - best) <= eps && leave < m && basis[i] < basis[leave])) {
          best = ratio;
          leave = i;
        }
      }
      if (leave == m) return false;
      pivot(leave, enter);
    }
  };

  Result res;
  std::vector<double> phase1(cols - 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) phase1[n + m + i] = 1.0;
  run(phase1, n + 2 * m);
  double infeas = 0;
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] >= n + m) infeas += t[i][rhs];
  if (infeas > 1e-7) return res;
  // Drive remaining (zero-valued) artificials out of the basis.
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n + m) continue;
    for (std::size_t j = 0; j < n + m; ++j)
      if (std::abs(t[i][j]) > eps) {
        pivot(i, j);
        break;
      }
  }

  std::vector<double> phase2(cols - 1, 0.0);
  for (std::size_t j = 0; j < n; ++j) phase2[j] = c[j];
  if (!run(phase2, n + m)) {
    res.status = Status::Unbounded;
    return res;
  }
  res.status = Status::Optimal;
  res.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] < n) res.x[basis[i]] = t[i][rhs];
  for (std::size_t j = 0; j < n; ++j) res.objective += c[j] * res.x[j];
  return res;
}

}  // namespace frg::lp
