#include "seqspace/simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace seqspace {

LpResult solve_lp_max(const std::vector<std::vector<double>>& A,
                      const std::vector<double>& b, const std::vector<double>& c,
                      int max_pivots) {
  const std::size_t m = A.size(), n = c.size();
  for (const auto& row : A)
    if (row.size() != n) throw std::invalid_argument("solve_lp_max: ragged A");
  if (b.size() != m) throw std::invalid_argument("solve_lp_max: |b| != rows");
  for (double bi : b)
    if (bi < 0) throw std::invalid_argument("solve_lp_max: needs b >= 0");

  constexpr double eps = 1e-11;
  // Tableau: rows 0..m-1 constraints, row m objective (reduced costs negated).
  // Columns: 0..n-1 structural, n..n+m-1 slack, n+m rhs.
  std::vector<std::vector<double>> T(m + 1, std::vector<double>(n + m + 1, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) T[i][j] = A[i][j];
    T[i][n + i] = 1.0;
    T[i][n + m] = b[i];
  }
  for (std::size_t j = 0; j < n; ++j) T[m][j] = -c[j];
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;

  LpResult res;
  for (int pivots = 0; pivots < max_pivots; ++pivots) {
    // Bland: entering = lowest-index column with negative reduced cost.
    std::size_t enter = n + m;
    for (std::size_t j = 0; j < n + m; ++j) {
      if (T[m][j] < -eps) {
        enter = j;
        break;
      }
    }
    if (enter == n + m) {
      res.optimal = true;
      break;
    }
    // Ratio test, Bland tie-break on basis index.
    std::size_t leave = m;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      if (T[i][enter] > eps) {
        double r = T[i][n + m] / T[i][enter];
        if (r < best - eps || (r < best + eps && (leave == m || basis[i] < basis[leave]))) {
          best = r;
          leave = i;
        }
      }
    }
    if (leave == m) {
      res.unbounded = true;
      return res;
    }
    double piv = T[leave][enter];
    for (std::size_t j = 0; j <= n + m; ++j) T[leave][j] /= piv;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == leave) continue;
      double f = T[i][enter];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= n + m; ++j) T[i][j] -= f * T[leave][j];
    }
    basis[leave] = enter;
  }

  res.z.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] < n) res.z[basis[i]] = T[i][n + m];
  double v = 0.0;
  for (std::size_t j = 0; j < n; ++j) v += c[j] * res.z[j];
  res.value = v;
  return res;
}

}  // namespace seqspace
