// SPDX-License-Identifier: Apache-2.0
#include "rdars/pdd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rdars/error.hpp"
#include "rdars/linalg.hpp"
#include "rdars/model.hpp"

namespace rdars {

namespace {

// I + (H_r P)^H diag(v) (H_r P) / sigma_c^2.
MatrixXcd connection_term(const MatrixXcd &hp, const VectorXd &v, double noise_conn) {
  MatrixXcd c = hp.adjoint() * v.cast<cplx>().asDiagonal() * hp / noise_conn;
  c.diagonal().array() += 1.0;
  return linalg::hermitian_part(c);
}

MatrixXcd reflected_channel(const ChannelSet &ch, const VectorXd &x, const PhaseVector &theta) {
  const VectorXcd coef = (1.0 - x.array()).cast<cplx>() * theta.values().array();
  return ch.weighted_direct() + ch.g_bs.adjoint() * (coef.asDiagonal() * ch.weighted_ris());
}

void check_state(const ChannelSet &ch, const PddState &st) {
  const auto n = ch.n_elements();
  if (st.x.size() != n || st.v.size() != n || st.theta.size() != n) {
    throw_dimension_mismatch("PDD state", n, 1, st.x.size(), 1);
  }
  if (!(st.rho > 0.0)) {
    throw Error(ErrorKind::InvalidInput, "PDD state: rho must be positive");
  }
}

} // namespace

void PddConfig::validate() const {
  if (!(rho0 > 0.0) || !(alpha > 0.0 && alpha < 1.0) || !(eps_violation > 0.0) || !(eps_rbp > 0.0) ||
      max_outer < 1 || max_inner < 1 || ccp_iters < 1 || !(qp.tol > 0.0) || !(ball.tol > 0.0) || qp.max_iter < 1 ||
      ball.max_iter < 1) {
    throw Error(ErrorKind::Config, "PddConfig: parameters out of range");
  }
}

PddState make_pdd_state(const ModeSelection &sel, const PhaseVector &theta, const PddConfig &cfg) {
  if (sel.n_elements() != theta.size()) {
    throw_dimension_mismatch("PDD init", sel.n_elements(), 1, theta.size(), 1);
  }
  PddState st;
  st.theta = theta;
  st.x = sel.mask_vector();
  st.v = st.x;
  st.rho = cfg.rho0;
  st.n_connected = sel.count();
  return st;
}

double relaxed_objective(const ChannelSet &ch, const VectorXd &x, const VectorXd &v, const PhaseVector &theta) {
  const MatrixXcd hb = reflected_channel(ch, x, theta);
  MatrixXcd k = connection_term(ch.weighted_ris(), v, ch.noise_conn) + hb.adjoint() * hb / ch.noise_bs;
  return linalg::trace_hpd_inverse(linalg::hermitian_part(k));
}

double cardinality_residual(const PddState &st) { return st.x.sum() - st.n_connected; }

double alignment_residual(const PddState &st) {
  const VectorXd wx = 2.0 * st.x.array() - 1.0;
  const VectorXd wv = 2.0 * st.v.array() - 1.0;
  return wx.dot(wv) - static_cast<double>(st.x.size());
}

double al_objective(const ChannelSet &ch, const PddState &st) {
  check_state(ch, st);
  const double c1 = cardinality_residual(st);
  const double c2 = alignment_residual(st);
  return relaxed_objective(ch, st.x, st.v, st.theta) + st.nu * c2 + st.lambda * c1 +
         (c1 * c1 + c2 * c2) / (2.0 * st.rho);
}

PhaseProblem theta_problem(const ChannelSet &ch, const PddState &st) {
  check_state(ch, st);
  PhaseProblem p;
  p.direct = ch.weighted_direct();
  p.reflect = (1.0 - st.x.array()).matrix().cast<cplx>().asDiagonal() * ch.g_bs;
  p.hp = ch.weighted_ris();
  p.noise_bs = ch.noise_bs;
  p.c_mat = connection_term(p.hp, st.v, ch.noise_conn);
  return p;
}

PhaseVector theta_update(const ChannelSet &ch, const PddState &st) {
  const PhaseProblem p = theta_problem(ch, st);
  return mm_phase_step(p.scratch_at(st.theta), st.theta);
}

XSurrogate x_surrogate(const ChannelSet &ch, const PddState &st) {
  check_state(ch, st);
  const auto n = ch.n_elements();
  const MatrixXcd hp = ch.weighted_ris();
  const MatrixXcd h_phi = st.theta.values().asDiagonal() * hp;
  const MatrixXcd y0 = ch.weighted_direct() + ch.g_bs.adjoint() * h_phi;
  const MatrixXcd x_k = y0 - ch.g_bs.adjoint() * (st.x.cast<cplx>().asDiagonal() * h_phi);

  const MatrixXcd c_inv = linalg::hpd_inverse(connection_term(hp, st.v, ch.noise_conn));
  MatrixXcd q = x_k * c_inv * x_k.adjoint();
  q.diagonal().array() += ch.noise_bs;
  const MatrixXcd q_inv = linalg::hpd_inverse(linalg::hermitian_part(q));
  const MatrixXcd z = c_inv * x_k.adjoint() * q_inv;
  const MatrixXcd gz = ch.g_bs * z.adjoint();
  const MatrixXcd u = gz * gz.adjoint();
  const MatrixXcd v = h_phi * c_inv * h_phi.adjoint();
  const MatrixXcd d = h_phi * (c_inv * (z - y0.adjoint() * (z.adjoint() * z))) * ch.g_bs.adjoint();

  XSurrogate s;
  s.xi = v.transpose().cwiseProduct(u).real();
  s.zeta = 2.0 * d.diagonal().real();

  // Dual and penalty terms in x with w = 2v - 1 held fixed.
  const VectorXd w = 2.0 * st.v.array() - 1.0;
  const double sw = w.sum();
  const double rho = st.rho;
  s.xi += (MatrixXd::Ones(n, n) + 4.0 * w * w.transpose()) / (2.0 * rho);
  s.zeta += ((rho * st.lambda - st.n_connected) * VectorXd::Ones(n) +
             2.0 * (rho * st.nu - static_cast<double>(n) - sw) * w) /
            rho;
  s.xi = 0.5 * (s.xi + s.xi.transpose());
  return s;
}

VectorXd x_update(const ChannelSet &ch, const PddState &st, const PddConfig &cfg, XUpdateReport *report) {
  const XSurrogate s = x_surrogate(ch, st);
  const EigSplit split = eig_split(s.xi);

  XUpdateReport rep;
  VectorXd x = st.x;
  rep.surrogate.push_back(s.value(x));
  for (int r = 0; r < cfg.ccp_iters; ++r) {
    BoxQP qp{split.psd, s.zeta + 2.0 * (split.nsd * x)};
    const SolveReport sol = solve_box_qp(qp, x, cfg.qp);
    rep.converged = rep.converged && sol.converged;
    const double moved = (sol.x - x).cwiseAbs().maxCoeff();
    x = sol.x;
    rep.surrogate.push_back(s.value(x));
    ++rep.rounds;
    if (moved <= cfg.qp.tol) {
      break;
    }
  }
  if (report) {
    *report = std::move(rep);
  }
  return x;
}

BallProblem v_problem(const ChannelSet &ch, const PddState &st) {
  check_state(ch, st);
  const MatrixXcd hb = reflected_channel(ch, st.x, st.theta);
  MatrixXcd base = hb.adjoint() * hb / ch.noise_bs;
  const MatrixXcd hp = ch.weighted_ris();
  const double noise_conn = ch.noise_conn;
  const VectorXd wx = 2.0 * st.x.array() - 1.0;
  const double n = static_cast<double>(st.x.size());
  const double rho = st.rho;
  const double nu = st.nu;

  BallProblem p;
  p.objective = [=](const VectorXd &v) -> std::optional<ValueGrad> {
    const MatrixXcd c = connection_term(hp, v, noise_conn);
    if (!linalg::try_cholesky(c)) {
      return std::nullopt;
    }
    const auto llt = linalg::try_cholesky(linalg::hermitian_part(c + base));
    if (!llt) {
      return std::nullopt;
    }
    const MatrixXcd k_inv = llt->solve(MatrixXcd::Identity(c.rows(), c.cols()));
    const double c2 = wx.dot(2.0 * v.array().matrix() - VectorXd::Ones(v.size())) - n;
    const MatrixXcd t = hp * k_inv;
    ValueGrad out;
    out.value = k_inv.trace().real() + nu * c2 + c2 * c2 / (2.0 * rho);
    out.gradient = -t.rowwise().squaredNorm() / noise_conn + (2.0 / rho) * (c2 + rho * nu) * wx;
    return out;
  };
  return p;
}

VectorXd v_update(const ChannelSet &ch, const PddState &st, const PddConfig &cfg, bool *converged) {
  const SolveReport sol = solve_ball_trace_inverse(v_problem(ch, st), st.v, cfg.ball);
  if (converged) {
    *converged = sol.converged;
  }
  return sol.x;
}

double constraint_violation(const PddState &st) {
  return std::max(std::abs(cardinality_residual(st)), std::abs(alignment_residual(st)));
}

bool outer_update(PddState &st, const PddConfig &cfg) {
  if (constraint_violation(st) < cfg.eps_violation) {
    const double c1 = cardinality_residual(st);
    const double c2 = alignment_residual(st);
    st.lambda += c1 / st.rho;
    st.nu += c2 / st.rho;
    return true;
  }
  st.rho *= cfg.alpha;
  return false;
}

ModeSelection round_to_binary(const VectorXd &x, int a) {
  const int n = static_cast<int>(x.size());
  if (a < 0 || a > n) {
    throw Error(ErrorKind::InvalidInput, "round_to_binary: a out of range");
  }
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return x(i) > x(j); });
  order.resize(static_cast<std::size_t>(a));
  return ModeSelection::from_indices(n, std::move(order));
}

PddResult run_pdd(const ChannelSet &ch, const SystemDims &dims, const PddConfig &cfg, const ModeSelection &init_sel,
                  const PhaseVector &init_theta) {
  dims.validate();
  ch.validate(dims);
  cfg.validate();
  if (init_sel.n_elements() != dims.n_elements || init_theta.size() != dims.n_elements) {
    throw_dimension_mismatch("PDD init", dims.n_elements, 1, init_sel.n_elements(), 1);
  }
  if (init_sel.count() != dims.n_connected) {
    throw Error(ErrorKind::InvalidInput, "run_pdd: initial selection must have n_connected elements");
  }

  PddState st = make_pdd_state(init_sel, init_theta, cfg);
  if (cfg.relative_rho) {
    const double f0 = relaxed_objective(ch, st.x, st.v, st.theta);
    const double n = static_cast<double>(dims.n_elements);
    st.rho = cfg.rho0 * n * n / std::max(f0, std::numeric_limits<double>::min());
  }
  // With nothing to connect the selection is pinned and only the phases move.
  const bool pinned = dims.n_connected == 0 || dims.n_connected == dims.n_elements;
  PddDiagnostics diag;
  double al_prev = al_objective(ch, st);
  st.history.push_back(al_prev);

  for (int outer = 0; outer < cfg.max_outer; ++outer) {
    PddOuterRecord rec;
    rec.outer = outer;
    for (int inner = 0; inner < cfg.max_inner; ++inner) {
      if (cfg.update_theta) {
        st.theta = theta_update(ch, st);
      }
      if (!pinned) {
        XUpdateReport xr;
        st.x = x_update(ch, st, cfg, &xr);
        bool v_ok = true;
        st.v = v_update(ch, st, cfg, &v_ok);
        st.unconverged_subsolves += static_cast<int>(!xr.converged) + static_cast<int>(!v_ok);
      }
      const double al = al_objective(ch, st);
      st.history.push_back(al);
      ++rec.inner_sweeps;
      const bool rbp = std::abs(al - al_prev) <= cfg.eps_rbp * std::abs(al_prev);
      al_prev = al;
      if (rbp) {
        rec.rbp_met = true;
        break;
      }
    }
    diag.total_sweeps += rec.inner_sweeps;
    rec.violation = constraint_violation(st);
    rec.al_value = al_prev;
    rec.dual_step = outer_update(st, cfg);
    rec.rho = st.rho;
    rec.lambda = st.lambda;
    rec.nu = st.nu;
    diag.outer.push_back(rec);
    if (rec.violation <= cfg.eps_violation && rec.rbp_met) {
      diag.converged = true;
      break;
    }
    // The AL changes with the duals or penalty, so progress restarts from here.
    al_prev = al_objective(ch, st);
  }
  diag.max_iterations = !diag.converged;
  diag.unconverged_subsolves = st.unconverged_subsolves;

  PddResult out;
  out.selection = round_to_binary(st.x, dims.n_connected);
  out.theta = st.theta;
  out.receiver = optimal_receiver(ch, out.selection, out.theta);
  out.x = st.x;
  out.v = st.v;
  out.diag = std::move(diag);
  return out;
}

} // namespace rdars
