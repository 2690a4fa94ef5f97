// SPDX-License-Identifier: Apache-2.0
#include "rdars/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "rdars/error.hpp"

namespace rdars {

namespace {

double distance(const Vec3 &a, const Vec3 &b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  const double dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

Vec3 unit_direction(const Vec3 &from, const Vec3 &to) {
  const double d = distance(from, to);
  if (!(d > 0.0)) {
    throw Error(ErrorKind::InvalidInput, "channel geometry: coincident positions");
  }
  return {(to[0] - from[0]) / d, (to[1] - from[1]) / d, (to[2] - from[2]) / d};
}

bool finite3(const Vec3 &v) { return std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]); }

MatrixXcd complex_gaussian(std::mt19937_64 &rng, int rows, int cols) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  MatrixXcd m(rows, cols);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      m(r, c) = cplx(re, im);
    }
  }
  return m;
}

} // namespace

void Topology::validate() const {
  if (!finite3(bs_position) || !finite3(rdars_position) || !finite3(user_center)) {
    throw Error(ErrorKind::InvalidInput, "Topology: positions must be finite");
  }
  if (!(user_radius >= 0.0) || !std::isfinite(user_radius)) {
    throw Error(ErrorKind::InvalidInput, "Topology: user_radius must be non-negative");
  }
}

void PathLossParams::validate() const {
  if (!(exponent_rb > 0.0) || !(exponent_ur > 0.0) || !(exponent_ub > 0.0)) {
    throw Error(ErrorKind::InvalidInput, "PathLossParams: exponents must be positive");
  }
  if (!(shadow_sigma_db >= 0.0) || !std::isfinite(beta0_db)) {
    throw Error(ErrorKind::InvalidInput, "PathLossParams: invalid beta0 or shadowing sigma");
  }
}

void RicianParams::validate() const {
  if (!(kappa >= 0.0 && kappa <= 1.0)) {
    throw Error(ErrorKind::InvalidInput, "RicianParams: kappa must lie in [0, 1]");
  }
}

void ArrayGeometry::validate() const {
  if (n_bs < 1 || n_h < 1 || n_v < 1) {
    throw Error(ErrorKind::InvalidInput, "ArrayGeometry: array sizes must be positive");
  }
}

ArrayGeometry ArrayGeometry::for_elements(int n_bs, int n_elements) {
  if (n_elements < 1) {
    throw Error(ErrorKind::InvalidInput, "ArrayGeometry: element count must be positive");
  }
  int n_v = static_cast<int>(std::sqrt(static_cast<double>(n_elements)));
  while (n_v > 1 && n_elements % n_v != 0) {
    --n_v;
  }
  ArrayGeometry geom{n_bs, n_elements / n_v, n_v};
  geom.validate();
  return geom;
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double path_loss(double distance_m, double exponent, const PathLossParams &params, double shadow_db) {
  if (!(distance_m > 0.0)) {
    throw Error(ErrorKind::InvalidInput, "path_loss: distance must be positive");
  }
  return std::pow(10.0, (params.beta0_db + shadow_db) / 10.0) * std::pow(distance_m, -exponent);
}

namespace {

VectorXcd ula_from_cosine(int n, double direction_cosine) {
  VectorXcd a(n);
  for (int k = 0; k < n; ++k) {
    a(k) = std::polar(1.0, std::numbers::pi * k * direction_cosine);
  }
  return a;
}

} // namespace

VectorXcd array_response_ula(int n, double angle) {
  if (n < 1) {
    throw Error(ErrorKind::InvalidInput, "array_response_ula: n must be positive");
  }
  return ula_from_cosine(n, std::sin(angle));
}

VectorXcd array_response_upa(const ArrayGeometry &geom, double azimuth, double elevation) {
  geom.validate();
  const VectorXcd horizontal = ula_from_cosine(geom.n_h, std::sin(azimuth) * std::sin(elevation));
  const VectorXcd vertical = ula_from_cosine(geom.n_v, std::cos(elevation));
  VectorXcd a(geom.n_elements());
  for (int h = 0; h < geom.n_h; ++h) {
    a.segment(h * geom.n_v, geom.n_v) = horizontal(h) * vertical;
  }
  return a;
}

MatrixXcd rician_channel(const MatrixXcd &los, const MatrixXcd &nlos, double kappa) {
  if (los.rows() != nlos.rows() || los.cols() != nlos.cols()) {
    throw_dimension_mismatch("nlos_draw", los.rows(), los.cols(), nlos.rows(), nlos.cols());
  }
  RicianParams{kappa}.validate();
  return std::sqrt(kappa) * los + std::sqrt(1.0 - kappa) * nlos;
}

PlanarAngles planar_angles(const Vec3 &from, const Vec3 &to) {
  const Vec3 u = unit_direction(from, to);
  // Local frame: broadside = global y, horizontal axis = global x, vertical = global z.
  return {std::atan2(u[0], u[1]), std::acos(std::clamp(u[2], -1.0, 1.0))};
}

double linear_angle(const Vec3 &from, const Vec3 &to) {
  const Vec3 u = unit_direction(from, to);
  return std::asin(std::clamp(u[0], -1.0, 1.0));
}

ChannelSet generate_channel_set(const SystemDims &dims, const Topology &topo, const PathLossParams &pl,
                                const RicianParams &ric, const RadioParams &radio, std::uint64_t seed) {
  dims.validate();
  topo.validate();
  pl.validate();
  ric.validate();
  const int n_r = dims.n_bs_antennas;
  const int m = dims.n_users;
  const int n = dims.n_elements;
  const ArrayGeometry geom = ArrayGeometry::for_elements(n_r, n);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> shadow(0.0, pl.shadow_sigma_db);

  std::vector<Vec3> users(static_cast<std::size_t>(m));
  for (auto &u : users) {
    const double r = topo.user_radius * std::sqrt(unit(rng));
    const double phi = 2.0 * std::numbers::pi * unit(rng);
    u = {topo.user_center[0] + r * std::cos(phi), topo.user_center[1] + r * std::sin(phi), topo.user_center[2]};
  }
  std::vector<double> shadow_ub(static_cast<std::size_t>(m));
  std::vector<double> shadow_ur(static_cast<std::size_t>(m));
  for (auto &s : shadow_ub) {
    s = shadow(rng);
  }
  for (auto &s : shadow_ur) {
    s = shadow(rng);
  }
  const double shadow_rb = shadow(rng);

  const MatrixXcd nlos_d = complex_gaussian(rng, n_r, m);
  const MatrixXcd nlos_r = complex_gaussian(rng, n, m);
  const MatrixXcd nlos_g = complex_gaussian(rng, n, n_r);

  ChannelSet ch;
  ch.h_direct.resize(n_r, m);
  ch.h_ris.resize(n, m);
  for (int k = 0; k < m; ++k) {
    const Vec3 &user = users[static_cast<std::size_t>(k)];
    const double gain_ub =
        path_loss(distance(user, topo.bs_position), pl.exponent_ub, pl, shadow_ub[static_cast<std::size_t>(k)]);
    ch.h_direct.col(k) = std::sqrt(gain_ub) * nlos_d.col(k);

    const double gain_ur = path_loss(distance(user, topo.rdars_position), pl.exponent_ur, pl,
                                     shadow_ur[static_cast<std::size_t>(k)]);
    const PlanarAngles dep = planar_angles(topo.rdars_position, user);
    const MatrixXcd los = array_response_upa(geom, dep.azimuth, dep.elevation);
    ch.h_ris.col(k) = std::sqrt(gain_ur) * rician_channel(los, nlos_r.col(k), ric.kappa);
  }

  const double gain_rb = path_loss(distance(topo.rdars_position, topo.bs_position), pl.exponent_rb, pl, shadow_rb);
  const PlanarAngles arrival = planar_angles(topo.rdars_position, topo.bs_position);
  const MatrixXcd los_g = array_response_upa(geom, arrival.azimuth, arrival.elevation) *
                          array_response_ula(n_r, linear_angle(topo.bs_position, topo.rdars_position)).adjoint();
  ch.g_bs = std::sqrt(gain_rb) * rician_channel(los_g, nlos_g, ric.kappa);

  ch.power = VectorXd::Constant(m, dbm_to_watts(radio.total_power_dbm) / m);
  ch.noise_bs = dbm_to_watts(radio.noise_bs_dbm);
  ch.noise_conn = dbm_to_watts(radio.noise_conn_dbm);
  return ch;
}

namespace {

void fnv_mix(std::uint64_t &h, const void *data, std::size_t bytes) {
  const auto *p = static_cast<const unsigned char *>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
}

} // namespace

std::uint64_t channel_fingerprint(const ChannelSet &ch) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const MatrixXcd *m : {&ch.h_direct, &ch.h_ris, &ch.g_bs}) {
    const long dims[2] = {m->rows(), m->cols()};
    fnv_mix(h, dims, sizeof(dims));
    fnv_mix(h, m->data(), sizeof(cplx) * static_cast<std::size_t>(m->size()));
  }
  fnv_mix(h, ch.power.data(), sizeof(double) * static_cast<std::size_t>(ch.power.size()));
  fnv_mix(h, &ch.noise_bs, sizeof(double));
  fnv_mix(h, &ch.noise_conn, sizeof(double));
  return h;
}

} // namespace rdars
