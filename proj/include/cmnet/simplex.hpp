#pragma once

#include <cstddef>
#include <vector>

namespace cmnet {

struct SimplexOptions {
  std::size_t max_pivots = 200'000;
  /// Consecutive non-improving pivots before switching to Bland's rule.
  std::size_t stall_limit = 50;
  double pivot_tolerance = 1e-11;
  double cost_tolerance = 1e-12;
  /// Scale of the right-hand-side shift applied while pivoting.
  double perturbation = 1e-7;
};

struct SimplexResult {
  enum class Status { kOptimal, kUnbounded };
  Status status = Status::kOptimal;
  double objective = 0.0;
  std::vector<double> x;
  /// Shadow prices of the constraint rows (nonnegative at optimality).
  std::vector<double> duals;
  std::size_t pivots = 0;
};

/// maximize c.x subject to A x <= b, x >= 0, with b >= 0 so that the slack
/// basis is feasible.
///
/// Dense tableau with Dantzig pricing and a fallback to Bland's rule on
/// stalls. The final primal and dual values are recomputed from the optimal
/// basis with an LU factorization. Throws SolverError when the pivot budget
/// is exhausted.
SimplexResult maximize_dense(const std::vector<std::vector<double>>& a, const std::vector<double>& b,
                             const std::vector<double>& c, const SimplexOptions& options = {});

}  // namespace cmnet
