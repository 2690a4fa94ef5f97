// SPDX-License-Identifier: Apache-2.0
#include "rdars/linalg.hpp"

#include <cmath>

#include "rdars/error.hpp"

namespace rdars::linalg {

std::optional<Eigen::LLT<MatrixXcd>> try_cholesky(const MatrixXcd &k) {
  Eigen::LLT<MatrixXcd> llt(k);
  if (llt.info() != Eigen::Success) {
    return std::nullopt;
  }
  // LLT only checks the sign of the pivots it meets; NaNs slip through.
  if (!llt.matrixLLT().allFinite()) {
    return std::nullopt;
  }
  return llt;
}

Eigen::LLT<MatrixXcd> cholesky(const MatrixXcd &k) {
  if (auto llt = try_cholesky(k)) {
    return *llt;
  }
  MatrixXcd jittered = k;
  jittered.diagonal().array() += kJitter;
  if (auto llt = try_cholesky(jittered)) {
    return *llt;
  }
  throw Error(ErrorKind::NotPositiveDefinite,
              "Cholesky factorization failed on a " + std::to_string(k.rows()) + "x" +
                  std::to_string(k.cols()) + " Gram matrix");
}

MatrixXcd hpd_solve(const MatrixXcd &k, const MatrixXcd &b) { return cholesky(k).solve(b); }

MatrixXcd hpd_inverse(const MatrixXcd &k) {
  return cholesky(k).solve(MatrixXcd::Identity(k.rows(), k.cols()));
}

double trace_hpd_inverse(const MatrixXcd &k) { return hpd_inverse(k).trace().real(); }

MatrixXcd hermitian_part(const MatrixXcd &a) { return 0.5 * (a + a.adjoint()); }

double power_iteration_max_eig(const MatrixXd &q, double rel_tol, int max_iter) {
  const auto n = q.rows();
  if (n == 0) {
    return 0.0;
  }
  // Non-uniform start so that the all-ones null direction of some inputs
  // does not stall the iteration.
  VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i) = 1.0 + 0.1 * std::sin(static_cast<double>(i) + 1.0);
  }
  x.normalize();
  double lambda = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    VectorXd y = q * x;
    const double norm = y.norm();
    if (norm == 0.0) {
      return 0.0;
    }
    const double next = x.dot(y);
    x = y / norm;
    if (it > 0 && std::abs(next - lambda) <= rel_tol * std::abs(next)) {
      return std::max(next, norm);
    }
    lambda = next;
  }
  return lambda;
}

bool all_finite(const MatrixXcd &m) { return m.allFinite(); }

} // namespace rdars::linalg
