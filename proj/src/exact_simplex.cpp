#include "cmnet/exact_simplex.hpp"

#include "cmnet/errors.hpp"

#include <cstddef>

namespace cmnet {
namespace {

// Dense tableau over Rational. Columns: structural, then artificial; the
// last column holds the right-hand side.
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), t_(rows, std::vector<Rational>(cols + 1)), basis_(rows) {}

  Rational& at(std::size_t r, std::size_t c) { return t_[r][c]; }
  Rational& rhs(std::size_t r) { return t_[r][cols_]; }
  std::vector<std::size_t>& basis() { return basis_; }

  // Maximizes obj.x over columns marked usable. Returns false if unbounded.
  bool optimize(const std::vector<Rational>& obj, const std::vector<bool>& usable) {
    for (;;) {
      // Reduced costs: obj_j - obj_B . column_j.
      std::size_t enter = cols_;
      for (std::size_t j = 0; j < cols_ && enter == cols_; ++j) {
        if (!usable[j]) continue;
        Rational reduced = obj[j];
        for (std::size_t r = 0; r < rows_; ++r) {
          if (!t_[r][j].is_zero()) reduced -= obj[basis_[r]] * t_[r][j];
        }
        if (reduced > 0) enter = j;  // Bland: lowest index
      }
      if (enter == cols_) return true;

      std::size_t leave = rows_;
      Rational best_ratio;
      for (std::size_t r = 0; r < rows_; ++r) {
        if (t_[r][enter] > 0) {
          Rational ratio = t_[r][cols_] / t_[r][enter];
          if (leave == rows_ || ratio < best_ratio ||
              (ratio == best_ratio && basis_[r] < basis_[leave])) {
            leave = r;
            best_ratio = ratio;
          }
        }
      }
      if (leave == rows_) return false;
      pivot(leave, enter);
    }
  }

  void pivot(std::size_t row, std::size_t col) {
    const Rational p = t_[row][col];
    for (auto& v : t_[row]) v /= p;
    for (std::size_t r = 0; r < rows_; ++r) {
      if (r == row || t_[r][col].is_zero()) continue;
      const Rational f = t_[r][col];
      for (std::size_t c = 0; c <= cols_; ++c) {
        if (!t_[row][c].is_zero()) t_[r][c] -= f * t_[row][c];
      }
    }
    basis_[row] = col;
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::vector<Rational>> t_;
  std::vector<std::size_t> basis_;
};

}  // namespace

ExactLpResult maximize_exact(const std::vector<std::vector<Rational>>& a,
                             const std::vector<Rational>& b,
                             const std::vector<Rational>& c) {
  const std::size_t m = a.size();
  const std::size_t n = c.size();
  if (b.size() != m) throw PreconditionError("maximize_exact: row count mismatch");
  for (const auto& row : a) {
    if (row.size() != n) throw PreconditionError("maximize_exact: column count mismatch");
  }

  Tableau tab(m, n + m);
  for (std::size_t r = 0; r < m; ++r) {
    const bool flip = b[r] < 0;
    for (std::size_t j = 0; j < n; ++j) tab.at(r, j) = flip ? Rational(-a[r][j]) : a[r][j];
    tab.at(r, n + r) = 1;
    tab.rhs(r) = flip ? Rational(-b[r]) : b[r];
    tab.basis()[r] = n + r;
  }

  // Phase 1: maximize -(sum of artificials).
  std::vector<Rational> phase1(n + m);
  for (std::size_t r = 0; r < m; ++r) phase1[n + r] = -1;
  std::vector<bool> usable(n + m, true);
  tab.optimize(phase1, usable);

  ExactLpResult result;
  for (std::size_t r = 0; r < m; ++r) {
    if (tab.basis()[r] >= n && !tab.rhs(r).is_zero()) {
      result.status = ExactLpResult::Status::kInfeasible;
      return result;
    }
  }
  // Drive zero-valued artificials out of the basis where possible; rows
  // where that fails are redundant and stay pinned at zero.
  for (std::size_t r = 0; r < m; ++r) {
    if (tab.basis()[r] < n) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (!tab.at(r, j).is_zero()) {
        tab.pivot(r, j);
        break;
      }
    }
  }

  // Phase 2.
  for (std::size_t r = 0; r < m; ++r) usable[n + r] = false;
  std::vector<Rational> phase2(n + m);
  for (std::size_t j = 0; j < n; ++j) phase2[j] = c[j];
  if (!tab.optimize(phase2, usable)) {
    result.status = ExactLpResult::Status::kUnbounded;
    return result;
  }

  result.status = ExactLpResult::Status::kOptimal;
  result.x.assign(n, Rational(0));
  for (std::size_t r = 0; r < m; ++r) {
    if (tab.basis()[r] < n) result.x[tab.basis()[r]] = tab.rhs(r);
  }
  for (std::size_t j = 0; j < n; ++j) result.objective += c[j] * result.x[j];
  return result;
}

}  // namespace cmnet
