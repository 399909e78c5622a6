#pragma once

#include "cmnet/rational.hpp"

#include <vector>

namespace cmnet {

struct ExactLpResult {
  enum class Status { kOptimal, kInfeasible, kUnbounded };
  Status status = Status::kInfeasible;
  std::vector<Rational> x;
  Rational objective;
};

/// maximize c.x subject to A x = b, x >= 0, in exact rational arithmetic.
///
/// Two-phase tableau simplex with Bland's rule; terminates on every input.
/// Intended for the small incidence systems of network preconditions.
ExactLpResult maximize_exact(const std::vector<std::vector<Rational>>& a,
                             const std::vector<Rational>& b,
                             const std::vector<Rational>& c);

}  // namespace cmnet
