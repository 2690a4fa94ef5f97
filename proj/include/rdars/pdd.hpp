// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "rdars/subsolvers.hpp"
#include "rdars/types.hpp"

namespace rdars {

struct PddConfig {
  /// Initial penalty. With relative_rho it is measured in units of
  /// N^2 / f(init), so the starting penalty weight does not depend on the SNR.
  double rho0 = 1e3;
  bool relative_rho = true;
  double alpha = 0.6;
  double eps_violation = 1e-6;
  double eps_rbp = 1e-5;
  int max_outer = 200;
  int max_inner = 30;
  int ccp_iters = 5;
  /// When false the phases stay at their initial value (selection-only runs).
  bool update_theta = true;
  SolverOptions qp;
  SolverOptions ball;

  void validate() const;
};

/// Duals and penalty held fixed during one inner sweep.
struct AlParams {
  double lambda = 0.0;
  double nu = 0.0;
  double rho = 1.0;
};

/// Relaxed iterate: x in [0,1]^N, v in the ball ||2v - 1|| <= sqrt(N).
struct PddState {
  PhaseVector theta;
  VectorXd x;
  VectorXd v;
  double lambda = 0.0;
  double nu = 0.0;
  double rho = 1.0;
  int n_connected = 0;
  std::vector<double> history;
  int unconverged_subsolves = 0;

  AlParams params() const { return {lambda, nu, rho}; }
};

/// x = v = mask, duals zero, rho = cfg.rho0 (absolute; run_pdd applies the
/// relative scaling).
PddState make_pdd_state(const ModeSelection &sel, const PhaseVector &theta, const PddConfig &cfg);

/// Tr{(I + (H_b P)^H H_b P / sigma_b^2 + (H_r P)^H diag(v) H_r P / sigma_c^2)^{-1}}
/// with H_b = H_d + G^H diag((1 - x) o theta) H_r.
double relaxed_objective(const ChannelSet &ch, const VectorXd &x, const VectorXd &v, const PhaseVector &theta);

/// x^T 1 - a.
double cardinality_residual(const PddState &st);
/// (2x - 1)^T (2v - 1) - N.
double alignment_residual(const PddState &st);

/// Relaxed objective plus dual and quadratic penalty terms.
double al_objective(const ChannelSet &ch, const PddState &st);

/// Phase block at the current (x, v).
PhaseProblem theta_problem(const ChannelSet &ch, const PddState &st);
PhaseVector theta_update(const ChannelSet &ch, const PddState &st);

/// Quadratic majorizer of the AL in x, anchored at st.x: x^T xi x + zeta^T x.
struct XSurrogate {
  MatrixXd xi;
  VectorXd zeta;
  double value(const VectorXd &x) const { return x.dot(xi * x) + zeta.dot(x); }
};
XSurrogate x_surrogate(const ChannelSet &ch, const PddState &st);

struct XUpdateReport {
  std::vector<double> surrogate; ///< surrogate value at the anchor and after every CCP round
  int rounds = 0;
  bool converged = true;
};
VectorXd x_update(const ChannelSet &ch, const PddState &st, const PddConfig &cfg, XUpdateReport *report = nullptr);

/// AL restricted to v (constant terms dropped). Empty outside the region
/// where the inner matrices stay positive definite.
BallProblem v_problem(const ChannelSet &ch, const PddState &st);
VectorXd v_update(const ChannelSet &ch, const PddState &st, const PddConfig &cfg, bool *converged = nullptr);

/// h = max(|x^T 1 - a|, |(2x - 1)^T (2v - 1) - N|).
double constraint_violation(const PddState &st);

/// Dual ascent when h < eps_violation, otherwise rho <- alpha rho.
/// Returns true when the duals were updated.
bool outer_update(PddState &st, const PddConfig &cfg);

/// Top-a entries of x; ties go to the lower index.
ModeSelection round_to_binary(const VectorXd &x, int a);

struct PddOuterRecord {
  int outer = 0;
  int inner_sweeps = 0;
  double violation = 0.0;
  double al_value = 0.0;
  double rho = 0.0;
  double lambda = 0.0;
  double nu = 0.0;
  bool dual_step = false;
  bool rbp_met = false;
};

struct PddDiagnostics {
  std::vector<PddOuterRecord> outer;
  int total_sweeps = 0;
  bool converged = false;
  bool max_iterations = false;
  int unconverged_subsolves = 0;
};

struct PddResult {
  ModeSelection selection;
  PhaseVector theta;
  Receiver receiver;
  VectorXd x; ///< relaxed x at exit, before rounding
  VectorXd v;
  PddDiagnostics diag;
};

PddResult run_pdd(const ChannelSet &ch, const SystemDims &dims, const PddConfig &cfg, const ModeSelection &init_sel,
                  const PhaseVector &init_theta);

} // namespace rdars
