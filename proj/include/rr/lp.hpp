#pragma once
#include <vector>

namespace rr {

struct LpResult {
  bool feasible = false;
  std::vector<double> x;
  double objective = 0.0;
};

// minimize c.x subject to A x = b and 0 <= x <= upper (upper may be +inf).
// Dense two-phase tableau simplex with Bland's rule; meant for small problems.
LpResult solve_lp(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                  const std::vector<double>& c, const std::vector<double>& upper);

}  // namespace rr
