#pragma once

#include "cmnet/distribution.hpp"
#include "cmnet/network.hpp"

#include <vector>

namespace cmnet {

inline constexpr double kDefaultFinnerTolerance = 1e-9;

struct FinnerViolation {
  OutcomeTuple outcome;
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Outcome-wise test of P(o) <= prod_j P_j(o_j)^{w_j}.
struct FinnerReport {
  bool exact = false;
  std::vector<FinnerViolation> violations;
  std::vector<OutcomeTuple> equalities;
  /// max over the support of P(o) / prod_j P_j(o_j)^{w_j}.
  double max_ratio = 0.0;
};

/// Exact tables are compared exactly: with w_j = p_j / q over a common
/// denominator q, P^q is compared with prod_j P_j^{p_j}. Float tables use
/// the ratio with tolerance `tol`. Weights must pass validate_weights.
FinnerReport finner_check(const Network& net, const Distribution& d, const FinnerWeights& w,
                          double tol = kDefaultFinnerTolerance);

}  // namespace cmnet
