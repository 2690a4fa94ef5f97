// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "rdars/types.hpp"

namespace rdars {

/// Incremental state of the forward greedy selector. m_inv is the inverse of
/// M_x = I + R_b + sum over selected j of u_j u_j^H / sigma_c^2, with
/// u_j = P^H h_j^H and h_j the j-th row of H_r.
struct GreedyState {
  MatrixXcd m_inv;
  std::vector<int> selected;
  std::vector<int> candidates;
  int x_count = 0;
};

struct AOConfig {
  double eps_ao = 1e-6;
  int max_ao_rounds = 20;
  int mm_iters_p9 = 50;
  double mm_rel_tol = 1e-8;

  void validate() const;
};

/// M_0 = I + (H_b' P)^H H_b' P / sigma_b^2 with every element reflecting.
GreedyState init_greedy(const ChannelSet &ch, const PhaseVector &ph);
/// Same bookkeeping from an explicit M_0 (used by the DAS placement).
GreedyState init_greedy(const MatrixXcd &m0, int n_elements);

/// Reduction of the approximate sum-MSE obtained by connecting element j.
double delta_gain(const GreedyState &st, const ChannelSet &ch, int j);
/// Candidate with the largest gain; ties go to the lower index.
int select_next(const GreedyState &st, const ChannelSet &ch);
/// Sherman-Morrison update of m_inv and set bookkeeping.
void commit_selection(GreedyState &st, const ChannelSet &ch, int j);

ModeSelection greedy_mode_select(const ChannelSet &ch, const PhaseVector &ph, const SystemDims &dims);
/// Greedy placement of distributed antennas next to the direct link only.
ModeSelection greedy_das_select(const ChannelSet &ch, const SystemDims &dims);

/// MM iterations on the approximate objective at a fixed selection. Stops
/// after iters steps or once the relative change drops to rel_tol.
/// trace (optional) receives the objective at theta0 and after each step.
PhaseVector phase_optimize_p9(const ChannelSet &ch, const ModeSelection &sel, const PhaseVector &theta0, int iters,
                              double rel_tol = 1e-8, std::vector<double> *trace = nullptr);

struct AOResult {
  ModeSelection selection;
  PhaseVector theta;
  Receiver receiver;
  std::vector<double> trace; ///< approximate objective after every round
  int rounds = 0;
  bool converged = false;
};

AOResult run_ao(const ChannelSet &ch, const SystemDims &dims, const AOConfig &cfg, const PhaseVector &theta0);

} // namespace rdars
