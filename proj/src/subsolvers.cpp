// SPDX-License-Identifier: Apache-2.0
#include "rdars/subsolvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rdars/error.hpp"
#include "rdars/linalg.hpp"

namespace rdars {

void BoxQP::validate() const {
  if (q.rows() != q.cols() || q.rows() != c.size()) {
    throw_dimension_mismatch("BoxQP.q", c.size(), c.size(), q.rows(), q.cols());
  }
  // Both tolerances scale with the entries; the x-block matrices can be far from unit size.
  const double scale = std::max(1.0, q.cwiseAbs().maxCoeff());
  if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw Error(ErrorKind::InvalidInput, "BoxQP: q is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(q, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() < -1e-8 * scale) {
    throw Error(ErrorKind::InvalidInput, "BoxQP: q is not positive semidefinite");
  }
}

VectorXd project_box(const VectorXd &x) { return x.cwiseMax(0.0).cwiseMin(1.0); }

VectorXd project_ball(const VectorXd &v, int n) {
  const VectorXd u = 2.0 * v.array() - 1.0;
  const double norm = u.norm();
  const double radius = std::sqrt(static_cast<double>(n));
  if (norm <= radius) {
    return v;
  }
  return (1.0 + u.array() * (radius / norm)) / 2.0;
}

SolveReport solve_box_qp(const BoxQP &p, const VectorXd &x0, const SolverOptions &opts) {
  if (x0.size() != p.c.size() || p.q.rows() != p.c.size() || p.q.cols() != p.c.size()) {
    throw_dimension_mismatch("BoxQP operands", p.c.size(), p.c.size(), p.q.rows(), p.q.cols());
  }
  p.validate();
  // Power iteration converges from below; pad so the step stays below 1/L.
  double lipschitz = std::max(2.0 * linalg::power_iteration_max_eig(p.q) * (1.0 + 1e-4), 1e-300);

  SolveReport rep;
  VectorXd x = project_box(x0);
  double fx = p.objective(x);
  rep.history.push_back(fx);
  VectorXd y = x;
  double t = 1.0;
  bool at_anchor = true; // y == x

  for (int it = 0; it < opts.max_iter; ++it) {
    const VectorXd z = project_box(y - p.gradient(y) / lipschitz);
    const double fz = p.objective(z);
    VectorXd x_next = x;
    double f_next = fx;
    bool restart = false;
    if (fz <= fx) {
      x_next = z;
      f_next = fz;
    } else {
      restart = true;
      // A plain projected step from x cannot ascend when 1/L is a valid
      // step, so the power-iteration estimate was too low.
      if (at_anchor) {
        lipschitz *= 2.0;
      }
    }
    at_anchor = restart;
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    if (restart) {
      y = x_next;
      t = 1.0;
    } else {
      y = x_next + (t / t_next) * (z - x_next) + ((t - 1.0) / t_next) * (x_next - x);
      t = t_next;
    }
    x = std::move(x_next);
    fx = f_next;
    rep.history.push_back(fx);
    rep.iterations = it + 1;

    const double residual = (x - project_box(x - p.gradient(x) / lipschitz)).cwiseAbs().maxCoeff();
    if (residual <= opts.tol) {
      rep.converged = true;
      break;
    }
  }
  rep.x = std::move(x);
  rep.value = fx;
  return rep;
}

SolveReport solve_ball_trace_inverse(const BallProblem &p, const VectorXd &v0, const SolverOptions &opts) {
  constexpr double kArmijo = 1e-4;
  constexpr double kMinStep = 1e-30;
  constexpr double kMinBB = 1e-20;
  constexpr double kMaxBB = 1e20;
  const int n = static_cast<int>(v0.size());

  SolveReport rep;
  VectorXd v = project_ball(v0, n);
  auto cur = p.objective(v);
  if (!cur) {
    throw Error(ErrorKind::NotPositiveDefinite, "solve_ball_trace_inverse: objective undefined at v0");
  }
  rep.history.push_back(cur->value);

  double trial = 1.0;
  for (int it = 0; it < opts.max_iter; ++it) {
    double step = trial;
    std::optional<ValueGrad> next;
    VectorXd v_next;
    while (step >= kMinStep) {
      v_next = project_ball(v - step * cur->gradient, n);
      next = p.objective(v_next);
      if (next && next->value <= cur->value + kArmijo * cur->gradient.dot(v_next - v)) {
        break;
      }
      next.reset();
      step *= 0.5;
    }
    rep.iterations = it + 1;
    if (!next) {
      // No admissible descent step left: v is stationary up to rounding.
      rep.converged = true;
      break;
    }
    const double decrease = cur->value - next->value;
    // Barzilai-Borwein step as the next first trial.
    const VectorXd sv = v_next - v;
    const VectorXd yv = next->gradient - cur->gradient;
    const double sy = sv.dot(yv);
    trial = sy > 0.0 ? std::clamp(sv.squaredNorm() / sy, kMinBB, kMaxBB) : 1.0;
    v = std::move(v_next);
    cur = std::move(next);
    rep.history.push_back(cur->value);
    if (decrease <= opts.tol * std::max(std::abs(cur->value), std::numeric_limits<double>::min())) {
      rep.converged = true;
      break;
    }
  }
  rep.x = std::move(v);
  rep.value = cur->value;
  return rep;
}

MatrixXcd PhaseProblem::effective(const PhaseVector &theta) const {
  return direct + reflect.adjoint() * (theta.values().asDiagonal() * hp);
}

double PhaseProblem::objective(const PhaseVector &theta) const {
  const MatrixXcd x = effective(theta);
  MatrixXcd k = c_mat + x.adjoint() * x / noise_bs;
  return linalg::trace_hpd_inverse(linalg::hermitian_part(k));
}

MMScratch PhaseProblem::scratch_at(const PhaseVector &theta) const {
  MMScratch s;
  s.c_mat = c_mat;
  s.x_anchor = effective(theta);
  const MatrixXcd c_inv = linalg::hpd_inverse(c_mat);
  MatrixXcd q = s.x_anchor * c_inv * s.x_anchor.adjoint();
  q.diagonal().array() += noise_bs;
  s.q_anchor = linalg::hermitian_part(q);
  const MatrixXcd q_inv = linalg::hpd_inverse(s.q_anchor);

  // Z = C^{-1} X^H Q^{-1}; the quadratic weight is B = Z^H Z.
  const MatrixXcd z = c_inv * s.x_anchor.adjoint() * q_inv;
  const MatrixXcd rz = reflect * z.adjoint();
  s.u_mat = rz * rz.adjoint();
  s.v_mat = linalg::hermitian_part(hp * c_inv * hp.adjoint());
  const MatrixXcd w = c_inv * (z - direct.adjoint() * (z.adjoint() * z));
  s.d_mat = hp * w * reflect.adjoint();

  double trace = 0.0;
  for (Eigen::Index n = 0; n < s.u_mat.rows(); ++n) {
    trace += (s.v_mat(n, n) * s.u_mat(n, n)).real();
  }
  s.lipschitz = trace;
  return s;
}

PhaseVector mm_phase_step(const MMScratch &scratch, const PhaseVector &theta_k) {
  const auto n = theta_k.size();
  if (scratch.u_mat.rows() != n || scratch.v_mat.rows() != n || scratch.d_mat.rows() != n) {
    throw_dimension_mismatch("MMScratch", n, n, scratch.u_mat.rows(), scratch.u_mat.cols());
  }
  const MatrixXcd s = scratch.v_mat.transpose().cwiseProduct(scratch.u_mat);
  VectorXcd t = s * theta_k.values() - scratch.lipschitz * theta_k.values();
  t -= scratch.d_mat.diagonal().conjugate();

  VectorXcd out = theta_k.values();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(t(i)) > 0.0) {
      out(i) = -std::polar(1.0, std::arg(t(i)));
    }
  }
  return PhaseVector(std::move(out));
}

EigSplit eig_split(const MatrixXd &m) {
  if (m.rows() != m.cols()) {
    throw_dimension_mismatch("eig_split input", m.rows(), m.rows(), m.rows(), m.cols());
  }
  const MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorKind::InvalidInput, "eig_split: eigendecomposition failed");
  }
  const VectorXd lambda = es.eigenvalues();
  const MatrixXd &u = es.eigenvectors();
  EigSplit out;
  out.psd = u * lambda.cwiseMax(0.0).asDiagonal() * u.transpose();
  out.nsd = u * lambda.cwiseMin(0.0).asDiagonal() * u.transpose();
  return out;
}

} // namespace rdars
