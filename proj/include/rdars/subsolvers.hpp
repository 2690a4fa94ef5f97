// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "rdars/types.hpp"

namespace rdars {

/// Convex quadratic x^T q x + c^T x over the unit box 0 <= x <= 1.
struct BoxQP {
  MatrixXd q;
  VectorXd c;

  double objective(const VectorXd &x) const { return x.dot(q * x) + c.dot(x); }
  VectorXd gradient(const VectorXd &x) const { return 2.0 * (q * x) + c; }
  /// Symmetry within 1e-10 and smallest eigenvalue >= -1e-8, both relative to
  /// max(1, largest entry magnitude).
  void validate() const;
};

/// Value and gradient of a smooth objective. Empty when the point lies
/// outside the objective's domain (for example a non-PD inner matrix).
struct ValueGrad {
  double value = 0.0;
  VectorXd gradient;
};
using BallObjective = std::function<std::optional<ValueGrad>(const VectorXd &)>;

/// Convex objective over {v : ||2v - 1|| <= sqrt(N)}.
struct BallProblem {
  BallObjective objective;
};

struct SolveReport {
  VectorXd x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> history; ///< objective at every accepted iterate, starting with x0
};

struct SolverOptions {
  double tol = 1e-8;
  int max_iter = 5000;
};

/// Entrywise clamp to [0, 1].
VectorXd project_box(const VectorXd &x);

/// Projection onto ||2v - 1|| <= sqrt(n).
VectorXd project_ball(const VectorXd &v, int n);

/// Monotone accelerated projected gradient (step 1/L with L the gradient
/// Lipschitz constant from power iteration). Stops when the fixed-point
/// residual x - P(x - grad / L) has infinity norm <= tol.
SolveReport solve_box_qp(const BoxQP &p, const VectorXd &x0, const SolverOptions &opts = {});

/// Projected gradient with Armijo backtracking (initial step 1, halving).
/// Stops once the relative objective decrease of an accepted step is <= tol.
/// Throws NotPositiveDefinite if v0 itself is outside the objective's domain.
SolveReport solve_ball_trace_inverse(const BallProblem &p, const VectorXd &v0, const SolverOptions &opts = {});

/// Anchor matrices of the majorizer used by the phase update.
///
/// The phase objective is Tr{(C + X^H X / sigma_b^2)^{-1}} with
/// X(theta) = X0 + R^H diag(theta) Hp. At the anchor theta_k it is majorized
/// by theta^H (V^T o U) theta - 2 Re{theta^H diag(D^H)} + const, which is in
/// turn majorized with the Lipschitz bound Tr(V^T o U) I.
struct MMScratch {
  MatrixXcd c_mat;    ///< C, M x M
  MatrixXcd x_anchor; ///< X(theta_k), N_r x M
  MatrixXcd q_anchor; ///< sigma_b^2 I + X C^{-1} X^H at the anchor
  MatrixXcd d_mat;    ///< D, N x N
  MatrixXcd u_mat;    ///< U, N x N
  MatrixXcd v_mat;    ///< V, N x N
  double lipschitz = 0.0;
};

/// A phase subproblem: fixed part X0 (= H_d P), reflecting rows R (N x N_r,
/// rows of non-reflecting elements zeroed), weighted surface channel Hp
/// (= H_r P), BS noise and the matrix C collecting everything independent of theta.
struct PhaseProblem {
  MatrixXcd direct;
  MatrixXcd reflect;
  MatrixXcd hp;
  double noise_bs = 1.0;
  MatrixXcd c_mat;

  MatrixXcd effective(const PhaseVector &theta) const;
  /// Tr{(C + X^H X / sigma_b^2)^{-1}}.
  double objective(const PhaseVector &theta) const;
  MMScratch scratch_at(const PhaseVector &theta) const;
};

/// One closed-form majorization step: theta_n = -exp(j arg t_n) with
/// t = (V^T o U - L I) theta_k - diag(D^H); entries with t_n = 0 keep theta_k.
PhaseVector mm_phase_step(const MMScratch &scratch, const PhaseVector &theta_k);

struct EigSplit {
  MatrixXd psd;
  MatrixXd nsd;
};

/// Splits a symmetric matrix into its positive and negative semidefinite parts.
EigSplit eig_split(const MatrixXd &m);

} // namespace rdars
