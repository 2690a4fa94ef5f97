// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>

#include "rdars/types.hpp"

namespace rdars::linalg {

/// Diagonal jitter tried once when a Cholesky factorization fails.
inline constexpr double kJitter = 1e-12;

/// Cholesky factor of a Hermitian matrix, without jitter. Empty when the
/// matrix is not numerically positive definite.
std::optional<Eigen::LLT<MatrixXcd>> try_cholesky(const MatrixXcd &k);

/// Cholesky factor with a single jitter retry; throws NotPositiveDefinite.
Eigen::LLT<MatrixXcd> cholesky(const MatrixXcd &k);

/// Solves K X = B for Hermitian positive-definite K.
MatrixXcd hpd_solve(const MatrixXcd &k, const MatrixXcd &b);

/// K^{-1} through the Cholesky factor.
MatrixXcd hpd_inverse(const MatrixXcd &k);

/// Tr(K^{-1}) for Hermitian positive-definite K.
double trace_hpd_inverse(const MatrixXcd &k);

/// (A + A^H) / 2.
MatrixXcd hermitian_part(const MatrixXcd &a);

/// Largest eigenvalue of a symmetric PSD matrix by power iteration.
double power_iteration_max_eig(const MatrixXd &q, double rel_tol = 1e-6, int max_iter = 10000);

bool all_finite(const MatrixXcd &m);

} // namespace rdars::linalg
