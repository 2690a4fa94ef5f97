// SPDX-License-Identifier: Apache-2.0
#include "rdars/model.hpp"

#include <numeric>

#include "rdars/error.hpp"
#include "rdars/linalg.hpp"

namespace rdars {

namespace {

void check_operands(const ChannelSet &ch, const ModeSelection &sel, const PhaseVector &ph) {
  ch.validate();
  const long n = ch.n_elements();
  if (sel.n_elements() != n) {
    throw_dimension_mismatch("mode selection", n, 1, sel.n_elements(), 1);
  }
  if (ph.size() != n) {
    throw_dimension_mismatch("phase vector", n, 1, ph.size(), 1);
  }
}

MatrixXcd connected_rows(const ChannelSet &ch, const ModeSelection &sel) {
  MatrixXcd rows(sel.count(), ch.n_users());
  for (int r = 0; r < sel.count(); ++r) {
    rows.row(r) = ch.h_ris.row(sel.indices()[static_cast<std::size_t>(r)]);
  }
  return rows;
}

VectorXd stacked_noise(const ChannelSet &ch, int n_conn) {
  VectorXd noise(ch.n_bs_antennas() + n_conn);
  noise.head(ch.n_bs_antennas()).setConstant(ch.noise_bs);
  noise.tail(n_conn).setConstant(ch.noise_conn);
  return noise;
}

MatrixXcd gram(const EffectiveChannel &eff, const VectorXd &power) {
  const VectorXd amp = amplitude(power);
  const MatrixXcd hp = eff.h * amp.cast<cplx>().asDiagonal();
  const VectorXd inv_noise = eff.noise.cwiseInverse();
  MatrixXcd k = hp.adjoint() * inv_noise.cast<cplx>().asDiagonal() * hp;
  k.diagonal().array() += 1.0;
  return linalg::hermitian_part(k);
}

} // namespace

VectorXd amplitude(const VectorXd &power) { return power.cwiseSqrt(); }

EffectiveChannel assemble_effective_channel(const ChannelSet &ch, const ModeSelection &sel,
                                            const PhaseVector &ph) {
  check_operands(ch, sel, ph);
  VectorXcd coef = ph.values();
  for (int n : sel.indices()) {
    coef(n) = 0.0;
  }
  EffectiveChannel eff;
  eff.n_bs = ch.n_bs_antennas();
  eff.h.resize(eff.n_bs + sel.count(), ch.n_users());
  eff.h.topRows(eff.n_bs) = ch.h_direct + ch.g_bs.adjoint() * (coef.asDiagonal() * ch.h_ris);
  eff.h.bottomRows(sel.count()) = connected_rows(ch, sel);
  eff.noise = stacked_noise(ch, sel.count());
  return eff;
}

EffectiveChannel assemble_das_channel(const ChannelSet &ch, const ModeSelection &sel) {
  ch.validate();
  if (sel.n_elements() != ch.n_elements()) {
    throw_dimension_mismatch("mode selection", ch.n_elements(), 1, sel.n_elements(), 1);
  }
  EffectiveChannel eff;
  eff.n_bs = ch.n_bs_antennas();
  eff.h.resize(eff.n_bs + sel.count(), ch.n_users());
  eff.h.topRows(eff.n_bs) = ch.h_direct;
  eff.h.bottomRows(sel.count()) = connected_rows(ch, sel);
  eff.noise = stacked_noise(ch, sel.count());
  return eff;
}

Receiver optimal_receiver(const EffectiveChannel &eff, const VectorXd &power) {
  if (!eff.h.allFinite() || !power.allFinite()) {
    throw Error(ErrorKind::InvalidInput, "optimal_receiver: non-finite channel entries");
  }
  if (power.size() != eff.h.cols()) {
    throw_dimension_mismatch("power", eff.h.cols(), 1, power.size(), 1);
  }
  const MatrixXcd hp = eff.h * amplitude(power).cast<cplx>().asDiagonal();
  MatrixXcd k = hp * hp.adjoint();
  k.diagonal() += eff.noise.cast<cplx>();
  // K is Hermitian, so W^H = K^{-1} H P.
  Receiver rx;
  rx.n_bs = eff.n_bs;
  rx.w = linalg::hpd_solve(linalg::hermitian_part(k), hp).adjoint();
  return rx;
}

Receiver optimal_receiver(const ChannelSet &ch, const ModeSelection &sel, const PhaseVector &ph) {
  return optimal_receiver(assemble_effective_channel(ch, sel, ph), ch.power);
}

MatrixXcd mse_matrix(const EffectiveChannel &eff, const VectorXd &power, const Receiver &rx) {
  const auto m = eff.h.cols();
  if (rx.w.rows() != m || rx.w.cols() != eff.h.rows()) {
    throw_dimension_mismatch("receiver", m, eff.h.rows(), rx.w.rows(), rx.w.cols());
  }
  const MatrixXcd hp = eff.h * amplitude(power).cast<cplx>().asDiagonal();
  MatrixXcd err = rx.w * hp;
  err.diagonal().array() -= 1.0;
  MatrixXcd mse = err * err.adjoint() + rx.w * eff.noise.cast<cplx>().asDiagonal() * rx.w.adjoint();
  return linalg::hermitian_part(mse);
}

MatrixXcd mse_matrix(const ChannelSet &ch, const ModeSelection &sel, const PhaseVector &ph,
                     const Receiver &rx) {
  return mse_matrix(assemble_effective_channel(ch, sel, ph), ch.power, rx);
}

double reduced_objective(const EffectiveChannel &eff, const VectorXd &power) {
  return linalg::trace_hpd_inverse(gram(eff, power));
}

double reduced_objective(const ChannelSet &ch, const ModeSelection &sel, const PhaseVector &ph) {
  return reduced_objective(assemble_effective_channel(ch, sel, ph), ch.power);
}

double approx_objective(const ChannelSet &ch, const ModeSelection &sel, const PhaseVector &ph) {
  check_operands(ch, sel, ph);
  EffectiveChannel eff;
  eff.n_bs = ch.n_bs_antennas();
  eff.h.resize(eff.n_bs + sel.count(), ch.n_users());
  eff.h.topRows(eff.n_bs) = ch.h_direct + ch.g_bs.adjoint() * (ph.values().asDiagonal() * ch.h_ris);
  eff.h.bottomRows(sel.count()) = connected_rows(ch, sel);
  eff.noise = stacked_noise(ch, sel.count());
  return reduced_objective(eff, ch.power);
}

double anmse(std::span<const double> trace_values, int n_users) {
  if (trace_values.empty()) {
    throw Error(ErrorKind::InvalidInput, "anmse: empty list of trace values");
  }
  if (n_users < 1) {
    throw Error(ErrorKind::InvalidInput, "anmse: user count must be positive");
  }
  const double sum = std::accumulate(trace_values.begin(), trace_values.end(), 0.0);
  return sum / static_cast<double>(trace_values.size()) / static_cast<double>(n_users);
}

} // namespace rdars
