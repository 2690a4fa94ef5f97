// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>

#include "rdars/types.hpp"

namespace rdars {

using Vec3 = std::array<double, 3>;

/// Deployment geometry in meters. Users are dropped uniformly in the
/// horizontal disk of radius user_radius around user_center.
struct Topology {
  Vec3 bs_position{0.0, 100.0, 5.0};
  Vec3 rdars_position{0.0, 50.0, 15.0};
  Vec3 user_center{0.0, 0.0, 1.5};
  double user_radius = 10.0;

  void validate() const;
};

/// PL(d) = beta0 * Psi * d^{-alpha}, with log-normal shadowing Psi.
struct PathLossParams {
  double beta0_db = -30.0;
  double exponent_rb = 2.2; ///< surface to BS
  double exponent_ur = 2.2; ///< user to surface
  double exponent_ub = 3.5; ///< user to BS
  double shadow_sigma_db = 5.8;

  void validate() const;
};

/// Normalized Rician factor of the surface-related channels. H_d stays Rayleigh.
struct RicianParams {
  double kappa = 0.75;

  void validate() const;
};

/// Transmit and noise levels that complete a ChannelSet.
struct RadioParams {
  double total_power_dbm = 20.0; ///< split evenly across users
  double noise_bs_dbm = -90.0;
  double noise_conn_dbm = -90.0;
};

/// BS: uniform linear array along the global x axis. Surface: uniform planar
/// array of n_h x n_v elements in the x-z plane, broadside along y.
/// Half-wavelength spacing on both.
struct ArrayGeometry {
  int n_bs = 1;
  int n_h = 1;
  int n_v = 1;

  int n_elements() const { return n_h * n_v; }
  void validate() const;

  /// n_h = n_v = sqrt(N) for square N, otherwise the most balanced
  /// factorization with n_h >= n_v.
  static ArrayGeometry for_elements(int n_bs, int n_elements);
};

double dbm_to_watts(double dbm);

/// Linear power gain 10^{(beta0 + shadow)/10} d^{-exponent}.
double path_loss(double distance_m, double exponent, const PathLossParams &params, double shadow_db);

/// Half-wavelength ULA steering vector, entry k = exp(j pi k sin(angle)).
VectorXcd array_response_ula(int n, double angle);

/// Kronecker product of the horizontal response in sin(az) sin(el) and the
/// vertical response in cos(el); el is measured from the array's vertical axis.
VectorXcd array_response_upa(const ArrayGeometry &geom, double azimuth, double elevation);

/// sqrt(kappa) * los + sqrt(1 - kappa) * nlos.
MatrixXcd rician_channel(const MatrixXcd &los, const MatrixXcd &nlos, double kappa);

/// Angles seen by the planar surface array toward a unit direction.
struct PlanarAngles {
  double azimuth = 0.0;
  double elevation = 0.0;
};
PlanarAngles planar_angles(const Vec3 &from, const Vec3 &to);
/// Angle seen by the BS linear array toward a point.
double linear_angle(const Vec3 &from, const Vec3 &to);

/// Draws one realization. Deterministic in every argument including seed.
ChannelSet generate_channel_set(const SystemDims &dims, const Topology &topo, const PathLossParams &pl,
                                const RicianParams &ric, const RadioParams &radio, std::uint64_t seed);

/// 64-bit FNV-1a over the raw channel, power and noise bytes.
std::uint64_t channel_fingerprint(const ChannelSet &ch);

} // namespace rdars
