// SPDX-License-Identifier: Apache-2.0
#include "rdars/greedy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rdars/error.hpp"
#include "rdars/linalg.hpp"
#include "rdars/model.hpp"
#include "rdars/subsolvers.hpp"

namespace rdars {

namespace {

VectorXcd user_vector(const ChannelSet &ch, int j) {
  if (j < 0 || j >= ch.n_elements()) {
    throw Error(ErrorKind::InvalidInput, "greedy: element index out of range");
  }
  return (ch.h_ris.row(j).transpose().conjugate().array() * amplitude(ch.power).cast<cplx>().array()).matrix();
}

bool is_candidate(const GreedyState &st, int j) {
  return std::find(st.candidates.begin(), st.candidates.end(), j) != st.candidates.end();
}

ModeSelection run_greedy(GreedyState st, const ChannelSet &ch, int a) {
  if (a < 0 || a > ch.n_elements()) {
    throw Error(ErrorKind::InvalidInput, "greedy: n_connected exceeds the number of elements");
  }
  for (int k = 0; k < a; ++k) {
    commit_selection(st, ch, select_next(st, ch));
  }
  return ModeSelection::from_indices(ch.n_elements(), st.selected);
}

} // namespace

void AOConfig::validate() const {
  if (!(eps_ao > 0.0) || max_ao_rounds < 1 || mm_iters_p9 < 1 || !(mm_rel_tol >= 0.0)) {
    throw Error(ErrorKind::Config, "AOConfig: parameters out of range");
  }
}

GreedyState init_greedy(const MatrixXcd &m0, int n_elements) {
  GreedyState st;
  st.m_inv = linalg::hpd_inverse(linalg::hermitian_part(m0));
  st.candidates.resize(static_cast<std::size_t>(n_elements));
  std::iota(st.candidates.begin(), st.candidates.end(), 0);
  return st;
}

GreedyState init_greedy(const ChannelSet &ch, const PhaseVector &ph) {
  ch.validate();
  if (ph.size() != ch.n_elements()) {
    throw_dimension_mismatch("phase vector", ch.n_elements(), 1, ph.size(), 1);
  }
  const MatrixXcd hb = ch.weighted_direct() + ch.g_bs.adjoint() * (ph.values().asDiagonal() * ch.weighted_ris());
  MatrixXcd m0 = hb.adjoint() * hb / ch.noise_bs;
  m0.diagonal().array() += 1.0;
  return init_greedy(m0, ch.n_elements());
}

double delta_gain(const GreedyState &st, const ChannelSet &ch, int j) {
  const VectorXcd u = user_vector(ch, j);
  const VectorXcd mu = st.m_inv * u;
  return mu.squaredNorm() / (ch.noise_conn + u.dot(mu).real());
}

int select_next(const GreedyState &st, const ChannelSet &ch) {
  if (st.candidates.empty()) {
    throw Error(ErrorKind::InvalidInput, "select_next: no candidates left");
  }
  int best = -1;
  double best_gain = -std::numeric_limits<double>::infinity();
  for (int j : st.candidates) {
    const double g = delta_gain(st, ch, j);
    if (g > best_gain || (g == best_gain && j < best)) {
      best = j;
      best_gain = g;
    }
  }
  return best;
}

void commit_selection(GreedyState &st, const ChannelSet &ch, int j) {
  if (!is_candidate(st, j)) {
    throw Error(ErrorKind::InvalidInput, "commit_selection: index is not a candidate");
  }
  const VectorXcd u = user_vector(ch, j);
  const VectorXcd mu = st.m_inv * u;
  const double den = ch.noise_conn + u.dot(mu).real();
  st.m_inv -= mu * mu.adjoint() / den;
  st.m_inv = linalg::hermitian_part(st.m_inv);
  st.candidates.erase(std::find(st.candidates.begin(), st.candidates.end(), j));
  st.selected.push_back(j);
  ++st.x_count;
}

ModeSelection greedy_mode_select(const ChannelSet &ch, const PhaseVector &ph, const SystemDims &dims) {
  return run_greedy(init_greedy(ch, ph), ch, dims.n_connected);
}

ModeSelection greedy_das_select(const ChannelSet &ch, const SystemDims &dims) {
  ch.validate();
  const MatrixXcd hd = ch.weighted_direct();
  MatrixXcd m0 = hd.adjoint() * hd / ch.noise_bs;
  m0.diagonal().array() += 1.0;
  return run_greedy(init_greedy(m0, ch.n_elements()), ch, dims.n_connected);
}

PhaseVector phase_optimize_p9(const ChannelSet &ch, const ModeSelection &sel, const PhaseVector &theta0, int iters,
                              double rel_tol, std::vector<double> *trace) {
  ch.validate();
  if (sel.n_elements() != ch.n_elements() || theta0.size() != ch.n_elements()) {
    throw_dimension_mismatch("phase_optimize_p9 operands", ch.n_elements(), 1, theta0.size(), 1);
  }
  PhaseProblem p;
  p.direct = ch.weighted_direct();
  p.reflect = ch.g_bs;
  p.hp = ch.weighted_ris();
  p.noise_bs = ch.noise_bs;
  MatrixXcd c = p.hp.adjoint() * sel.mask_vector().cast<cplx>().asDiagonal() * p.hp / ch.noise_conn;
  c.diagonal().array() += 1.0;
  p.c_mat = linalg::hermitian_part(c);

  PhaseVector theta = theta0;
  double f = p.objective(theta);
  if (trace) {
    trace->assign(1, f);
  }
  for (int t = 0; t < iters; ++t) {
    PhaseVector next = mm_phase_step(p.scratch_at(theta), theta);
    const double f_next = p.objective(next);
    theta = std::move(next);
    const double change = std::abs(f - f_next);
    f = f_next;
    if (trace) {
      trace->push_back(f);
    }
    if (change <= rel_tol * std::abs(f)) {
      break;
    }
  }
  return theta;
}

AOResult run_ao(const ChannelSet &ch, const SystemDims &dims, const AOConfig &cfg, const PhaseVector &theta0) {
  dims.validate();
  ch.validate(dims);
  cfg.validate();
  AOResult out;
  out.theta = theta0;
  double f_prev = std::numeric_limits<double>::infinity();
  for (int round = 0; round < cfg.max_ao_rounds; ++round) {
    ModeSelection sel = greedy_mode_select(ch, out.theta, dims);
    // Greedy is not a descent step on its own; keep the incumbent if it was better.
    if (round > 0 && approx_objective(ch, out.selection, out.theta) < approx_objective(ch, sel, out.theta)) {
      sel = out.selection;
    }
    out.selection = std::move(sel);
    out.theta = phase_optimize_p9(ch, out.selection, out.theta, cfg.mm_iters_p9, cfg.mm_rel_tol);
    const double f = approx_objective(ch, out.selection, out.theta);
    out.trace.push_back(f);
    out.rounds = round + 1;
    if (std::abs(f_prev - f) <= cfg.eps_ao) {
      out.converged = true;
      break;
    }
    f_prev = f;
  }
  out.receiver = optimal_receiver(ch, out.selection, out.theta);
  return out;
}

} // namespace rdars
