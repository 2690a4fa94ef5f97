// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace rdars {

using cplx = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

/// Problem dimensions: BS antennas, users, surface elements and how many of
/// those elements are wired to the BS.
struct SystemDims {
  int n_bs_antennas = 1;
  int n_users = 1;
  int n_elements = 1;
  int n_connected = 0;

  void validate() const;
  friend bool operator==(const SystemDims &, const SystemDims &) = default;
};

/// One channel realization plus the per-user powers and the two noise floors.
///
/// h_direct is N_r x M (users to BS), h_ris is N x M (users to surface) and
/// g_bs is N x N_r (surface to BS). power holds p_m in watts, so the
/// amplitude matrix is diag(sqrt(p)).
struct ChannelSet {
  MatrixXcd h_direct;
  MatrixXcd h_ris;
  MatrixXcd g_bs;
  VectorXd power;
  double noise_bs = 1.0;
  double noise_conn = 1.0;

  int n_bs_antennas() const { return static_cast<int>(h_direct.rows()); }
  int n_users() const { return static_cast<int>(h_direct.cols()); }
  int n_elements() const { return static_cast<int>(h_ris.rows()); }

  /// Checks shapes against dims (ignoring n_connected), finiteness and signs.
  void validate(const SystemDims &dims) const;
  /// Same checks using the shapes implied by h_direct and h_ris.
  void validate() const;

  /// H_d P.
  MatrixXcd weighted_direct() const;
  /// H_r P.
  MatrixXcd weighted_ris() const;
};

/// Binary mode selection: mask has a one for every element in connection mode.
class ModeSelection {
public:
  ModeSelection() = default;

  static ModeSelection from_indices(int n_elements, std::vector<int> indices);
  static ModeSelection from_mask(std::span<const std::uint8_t> mask);
  static ModeSelection none(int n_elements) { return from_indices(n_elements, {}); }
  /// Elements 0..a-1.
  static ModeSelection first(int n_elements, int a);

  int n_elements() const { return static_cast<int>(mask_.size()); }
  int count() const { return static_cast<int>(indices_.size()); }
  const std::vector<std::uint8_t> &mask() const { return mask_; }
  const std::vector<int> &indices() const { return indices_; }
  bool contains(int n) const { return mask_.at(static_cast<std::size_t>(n)) != 0; }
  VectorXd mask_vector() const;

  friend bool operator==(const ModeSelection &, const ModeSelection &) = default;

private:
  std::vector<std::uint8_t> mask_;
  std::vector<int> indices_;
};

/// Unit-modulus reflection coefficients theta (Phi = diag(theta)).
class PhaseVector {
public:
  static constexpr double kModulusTol = 1e-12;

  PhaseVector() = default;
  /// Validates |theta_n| = 1 for every entry.
  explicit PhaseVector(VectorXcd theta);

  static PhaseVector ones(int n);
  static PhaseVector from_angles(const VectorXd &angles);

  int size() const { return static_cast<int>(theta_.size()); }
  const VectorXcd &values() const { return theta_; }
  cplx operator[](int n) const { return theta_(n); }

private:
  VectorXcd theta_;
};

/// Receive beamformer W, M x (N_r + a). The first n_bs columns form W_b.
struct Receiver {
  MatrixXcd w;
  int n_bs = 0;

  auto w_bs() const { return w.leftCols(n_bs); }
  auto w_conn() const { return w.rightCols(w.cols() - n_bs); }
};

} // namespace rdars
