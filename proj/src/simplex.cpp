#include "cmnet/simplex.hpp"

#include "cmnet/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>

namespace cmnet {

SimplexResult maximize_dense(const std::vector<std::vector<double>>& a, const std::vector<double>& b,
                             const std::vector<double>& c, const SimplexOptions& options) {
  const std::size_t m = a.size();
  const std::size_t n = c.size();
  if (b.size() != m) throw PreconditionError("maximize_dense: row count mismatch");
  for (std::size_t i = 0; i < m; ++i) {
    if (a[i].size() != n) throw PreconditionError("maximize_dense: column count mismatch");
    if (!(b[i] >= 0.0)) throw PreconditionError("maximize_dense: right-hand side must be nonnegative");
  }

  // Columns 0..n-1 structural, n..n+m-1 slack, n+m right-hand side.
  const std::size_t width = n + m + 1;
  const std::size_t rhs = n + m;
  std::vector<double> tab((m + 1) * width, 0.0);
  auto at = [&](std::size_t r, std::size_t col) -> double& { return tab[r * width + col]; };
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) at(i, j) = a[i][j];
    at(i, n + i) = 1.0;
    // A small distinct shift per row breaks the heavy degeneracy of margin
    // LPs; the final basis is re-evaluated against the true b below.
    at(i, rhs) = b[i] + options.perturbation * (1.0 + static_cast<double>((i * 2654435761u) % 1024) / 1024.0);
    basis[i] = n + i;
  }
  // Objective row holds reduced costs; its rhs cell holds -objective.
  for (std::size_t j = 0; j < n; ++j) at(m, j) = c[j];

  SimplexResult result;
  bool bland = false;
  std::size_t stall = 0;
  double last_objective = 0.0;
  for (;;) {
    std::size_t enter = width;
    double best = options.cost_tolerance;
    for (std::size_t j = 0; j < n + m; ++j) {
      const double d = at(m, j);
      if (d > best) {
        enter = j;
        if (bland) break;
        best = d;
      }
    }
    if (enter == width) break;

    std::size_t leave = m;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      const double p = at(i, enter);
      if (p <= options.pivot_tolerance) continue;
      const double ratio = std::max(at(i, rhs), 0.0) / p;
      if (leave == m || ratio < best_ratio - 1e-15) {
        leave = i;
        best_ratio = ratio;
      } else if (ratio <= best_ratio + 1e-15) {
        const bool take = bland ? basis[i] < basis[leave] : p > at(leave, enter);
        if (take) {
          leave = i;
          best_ratio = std::min(best_ratio, ratio);
        }
      }
    }
    if (leave == m) {
      result.status = SimplexResult::Status::kUnbounded;
      return result;
    }

    if (++result.pivots > options.max_pivots) throw SolverError("simplex pivot budget exhausted");
    const double p = at(leave, enter);
    for (std::size_t col = 0; col < width; ++col) at(leave, col) /= p;
    at(leave, enter) = 1.0;
    for (std::size_t r = 0; r <= m; ++r) {
      if (r == leave) continue;
      const double f = at(r, enter);
      if (f == 0.0) continue;
      double* row = &tab[r * width];
      const double* prow = &tab[leave * width];
      for (std::size_t col = 0; col < width; ++col) row[col] -= f * prow[col];
      row[enter] = 0.0;
    }
    basis[leave] = enter;

    const double objective = -at(m, rhs);
    if (objective > last_objective + 1e-14) {
      stall = 0;
      last_objective = objective;
    } else if (++stall >= options.stall_limit) {
      bland = true;
    }
  }

  // Recompute the basic solution and duals from the final basis.
  Eigen::MatrixXd bm = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  Eigen::VectorXd bv(static_cast<Eigen::Index>(m));
  Eigen::VectorXd cb(static_cast<Eigen::Index>(m));
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t col = basis[k];
    for (std::size_t i = 0; i < m; ++i) {
      bm(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          col < n ? a[i][col] : (col - n == i ? 1.0 : 0.0);
    }
    cb(static_cast<Eigen::Index>(k)) = col < n ? c[col] : 0.0;
  }
  for (std::size_t i = 0; i < m; ++i) bv(static_cast<Eigen::Index>(i)) = b[i];
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(bm);
  const Eigen::VectorXd xb = lu.solve(bv);
  const Eigen::VectorXd pi = lu.transpose().solve(cb);

  result.status = SimplexResult::Status::kOptimal;
  result.x.assign(n, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    if (basis[k] < n) result.x[basis[k]] = xb(static_cast<Eigen::Index>(k));
  }
  result.duals.resize(m);
  for (std::size_t i = 0; i < m; ++i) result.duals[i] = pi(static_cast<Eigen::Index>(i));
  result.objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) result.objective += c[j] * result.x[j];
  if (!std::isfinite(result.objective)) throw SolverError("simplex lost numerical stability");
  return result;
}

}  // namespace cmnet
