// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

#include "rdars/types.hpp"

namespace rdars {

/// Stacked channel [H_b; H_c] with the diagonal of the noise covariance.
struct EffectiveChannel {
  MatrixXcd h;      ///< (N_r + a) x M
  VectorXd noise;   ///< diag(Lambda), length N_r + a
  int n_bs = 0;

  auto h_bs() const { return h.topRows(n_bs); }
  auto h_conn() const { return h.bottomRows(h.rows() - n_bs); }
};

/// H_b = H_d + G^H (I - A) Phi H_r on top, H_c = A_a H_r below with rows in
/// ascending element order.
EffectiveChannel assemble_effective_channel(const ChannelSet &ch, const ModeSelection &sel,
                                            const PhaseVector &ph);

/// Direct-link-plus-connected-antenna channel [H_d; A_a H_r] (no reflection).
EffectiveChannel assemble_das_channel(const ChannelSet &ch, const ModeSelection &sel);

/// MMSE receiver W* = P^H H^H (H P P^H H^H + Lambda)^{-1}.
Receiver optimal_receiver(const EffectiveChannel &eff, const VectorXd &power);
Receiver optimal_receiver(const ChannelSet &ch, const ModeSelection &sel, const PhaseVector &ph);

/// (W H P - I)(W H P - I)^H + W Lambda W^H.
MatrixXcd mse_matrix(const EffectiveChannel &eff, const VectorXd &power, const Receiver &rx);
MatrixXcd mse_matrix(const ChannelSet &ch, const ModeSelection &sel, const PhaseVector &ph,
                     const Receiver &rx);

/// Tr{(I + P^H H^H Lambda^{-1} H P)^{-1}}: the sum-MSE once W is optimal.
double reduced_objective(const EffectiveChannel &eff, const VectorXd &power);
double reduced_objective(const ChannelSet &ch, const ModeSelection &sel, const PhaseVector &ph);

/// Sum-MSE with the reflection path of connected elements kept, i.e. H_b
/// replaced by H_d + G^H Phi H_r. Used by the greedy selector.
double approx_objective(const ChannelSet &ch, const ModeSelection &sel, const PhaseVector &ph);

/// Mean of Tr(MSE)/M over realizations.
double anmse(std::span<const double> trace_values, int n_users);

/// sqrt of the per-user powers.
VectorXd amplitude(const VectorXd &power);

} // namespace rdars
