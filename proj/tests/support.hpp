#pragma once

#include "cmnet/quantum.hpp"
#include "cmnet/search.hpp"

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>

namespace cmnet::testing {

// Haar-like random unitary from Householder QR; independent of the
// Gram-Schmidt parametrization under test.
inline ComplexMatrix random_unitary(PortableRng& rng, std::size_t d = 3) {
  Eigen::MatrixXcd z(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    for (Eigen::Index j = 0; j < z.cols(); ++j) z(i, j) = {rng.normal(), rng.normal()};
  }
  const Eigen::MatrixXcd q = z.householderQr().householderQ();
  ComplexMatrix u(d, std::vector<Complex>(d));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) u[i][j] = q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  return u;
}

inline ComplexMatrix permutation_matrix(const std::array<int, 3>& perm) {
  ComplexMatrix u(3, std::vector<Complex>(3, 0.0));
  for (int r = 0; r < 3; ++r) u[r][perm[r]] = 1.0;
  return u;
}

// Row r multiplied by exp(i phase_r).
inline ComplexMatrix with_row_phases(ComplexMatrix u, const std::vector<double>& phases) {
  for (std::size_t r = 0; r < u.size(); ++r) {
    for (auto& z : u[r]) z *= std::polar(1.0, phases[r]);
  }
  return u;
}

// Ambiguous-view column (0 = view 01, 1 = view 12, 2 = view 20) read by
// parties A, B, C, D under hidden pattern t (0-based).
inline constexpr int kFig1Column[3][4] = {{0, 1, 1, 2}, {1, 2, 2, 0}, {2, 0, 0, 1}};

// Hand contraction of the three hidden patterns for the all-ambiguous block.
inline double fig1_block_oracle(const std::array<ComplexMatrix, 4>& u, const std::array<int, 4>& o) {
  Complex amp = 0.0;
  for (const auto& cols : kFig1Column) {
    Complex term = 1.0;
    for (int x = 0; x < 4; ++x) term *= u[x][o[x]][cols[x]];
    amp += term;
  }
  return std::norm(amp) / 27.0;
}

}  // namespace cmnet::testing
