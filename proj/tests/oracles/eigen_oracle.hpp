// Test-only oracle: dense eigensolves and direct solves through Eigen,
// independent of the library's own Cholesky and CG paths.
#ifndef LINCG_TESTS_ORACLES_EIGEN_ORACLE_HPP
#define LINCG_TESTS_ORACLES_EIGEN_ORACLE_HPP

#include <Eigen/Dense>

#include <vector>

#include "lincg/linalg.hpp"

namespace lincg::oracle {

inline Eigen::MatrixXd to_eigen(const Matrix& a) {
  const auto n = static_cast<Eigen::Index>(a.order());
  Eigen::MatrixXd m(n, n);
  const auto dense = a.to_dense();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = dense[static_cast<std::size_t>(i * n + j)];
  return m;
}

/// Ascending eigenvalues.
inline std::vector<double> eigenvalues(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(to_eigen(a), Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

inline double condition_number(const Matrix& a) {
  const auto ev = eigenvalues(a);
  return ev.back() / ev.front();
}

/// Solves A x = rhs with a pivoted LDLᵀ factorization.
inline Vector direct_solve(const Matrix& a, const Vector& rhs) {
  const Eigen::Map<const Eigen::VectorXd> r(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
  const Eigen::VectorXd x = to_eigen(a).ldlt().solve(r);
  return {x.data(), x.data() + x.size()};
}

}  // namespace lincg::oracle

#endif  // LINCG_TESTS_ORACLES_EIGEN_ORACLE_HPP
