#pragma once
// Small dense primal simplex for the polytope subproblems:
//   maximize c^T z   subject to  A z <= b,  z >= 0
// with b > 0 (the slack basis is feasible). Bland's rule; sizes here are a
// few dozen variables and a few hundred rows.

#include <vector>

namespace seqspace {

struct LpResult {
  bool optimal = false;    // false: iteration cap or unbounded
  bool unbounded = false;
  double value = 0.0;
  std::vector<double> z;
};

LpResult solve_lp_max(const std::vector<std::vector<double>>& A,
                      const std::vector<double>& b, const std::vector<double>& c,
                      int max_pivots = 20000);

}  // namespace seqspace
