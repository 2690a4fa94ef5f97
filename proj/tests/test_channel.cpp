// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rdars/channel.hpp"
#include "rdars/error.hpp"

using namespace rdars;

TEST_CASE("dBm conversion and path loss") {
  CHECK(dbm_to_watts(30.0) == doctest::Approx(1.0));
  CHECK(dbm_to_watts(-90.0) == doctest::Approx(1e-12));
  PathLossParams pl;
  CHECK(path_loss(1.0, 2.2, pl, 0.0) == doctest::Approx(1e-3));
  CHECK(path_loss(10.0, 2.0, pl, 0.0) == doctest::Approx(1e-5));
  CHECK(path_loss(10.0, 2.0, pl, 10.0) == doctest::Approx(1e-4));
  CHECK_THROWS_AS(path_loss(0.0, 2.0, pl, 0.0), Error);
}

TEST_CASE("array responses are unit modulus with the expected progression") {
  const VectorXcd a = array_response_ula(4, std::numbers::pi / 6.0); // sin = 1/2
  for (int k = 0; k < 4; ++k) {
    CHECK(std::abs(a(k)) == doctest::Approx(1.0));
    CHECK(std::abs(a(k) - std::polar(1.0, std::numbers::pi * k * 0.5)) < 1e-12);
  }
  const ArrayGeometry g{1, 3, 2};
  const VectorXcd u = array_response_upa(g, std::numbers::pi / 2.0, std::numbers::pi / 2.0);
  // Broadside in elevation: vertical phase is constant, horizontal steps by pi.
  for (int h = 0; h < 3; ++h) {
    for (int v = 0; v < 2; ++v) {
      CHECK(std::abs(u(h * 2 + v) - std::polar(1.0, std::numbers::pi * h)) < 1e-12);
    }
  }
}

TEST_CASE("array geometry picks the most balanced factorization") {
  CHECK(ArrayGeometry::for_elements(4, 64).n_h == 8);
  CHECK(ArrayGeometry::for_elements(4, 64).n_v == 8);
  CHECK(ArrayGeometry::for_elements(4, 8).n_h == 4);
  CHECK(ArrayGeometry::for_elements(4, 8).n_v == 2);
  CHECK(ArrayGeometry::for_elements(4, 7).n_v == 1);
}

TEST_CASE("planar angles in the surface frame") {
  const auto broadside = planar_angles({0, 0, 0}, {0, 10, 0});
  CHECK(broadside.azimuth == doctest::Approx(0.0));
  CHECK(broadside.elevation == doctest::Approx(std::numbers::pi / 2.0));
  const auto side = planar_angles({0, 0, 0}, {5, 5, 0});
  CHECK(side.azimuth == doctest::Approx(std::numbers::pi / 4.0));
  CHECK(linear_angle({0, 0, 0}, {1, 1, 0}) == doctest::Approx(std::numbers::pi / 4.0));
}

TEST_CASE("rician mixing endpoints") {
  const MatrixXcd los = MatrixXcd::Ones(3, 2);
  const MatrixXcd nlos = MatrixXcd::Constant(3, 2, cplx(0, 2));
  CHECK((rician_channel(los, nlos, 1.0) - los).norm() == 0.0);
  CHECK((rician_channel(los, nlos, 0.0) - nlos).norm() == 0.0);
  CHECK_THROWS_AS(rician_channel(los, nlos, 1.5), Error);
}

TEST_CASE("channel generation is deterministic in the seed and shaped by dims") {
  const SystemDims d{4, 3, 16, 2};
  const auto a = generate_channel_set(d, {}, {}, {}, {}, 11);
  const auto b = generate_channel_set(d, {}, {}, {}, {}, 11);
  const auto c = generate_channel_set(d, {}, {}, {}, {}, 12);
  CHECK(channel_fingerprint(a) == channel_fingerprint(b));
  CHECK(channel_fingerprint(a) != channel_fingerprint(c));
  CHECK_NOTHROW(a.validate(d));
  CHECK(a.power.sum() == doctest::Approx(dbm_to_watts(20.0)));
  CHECK(a.noise_bs == doctest::Approx(1e-12));
}

TEST_CASE("pure line of sight makes the surface links rank one with constant modulus") {
  const SystemDims d{4, 1, 16, 2};
  const auto ch = generate_channel_set(d, {}, {}, RicianParams{1.0}, {}, 5);
  const Eigen::JacobiSVD<MatrixXcd> svd(ch.g_bs);
  CHECK(svd.singularValues()(1) < 1e-10 * svd.singularValues()(0));
  const VectorXd mod = ch.h_ris.col(0).cwiseAbs();
  CHECK(mod.maxCoeff() - mod.minCoeff() < 1e-12 * mod.maxCoeff());
}

TEST_CASE("fingerprint reacts to every field") {
  const SystemDims d{2, 2, 4, 1};
  auto ch = generate_channel_set(d, {}, {}, {}, {}, 3);
  const auto h0 = channel_fingerprint(ch);
  ch.noise_conn *= 2.0;
  CHECK(channel_fingerprint(ch) != h0);
}

TEST_CASE("invalid generator inputs are rejected") {
  const SystemDims d{2, 1, 4, 1};
  Topology t;
  t.user_radius = -1.0;
  CHECK_THROWS_AS(generate_channel_set(d, t, {}, {}, {}, 1), Error);
  CHECK_THROWS_AS(generate_channel_set(d, {}, {}, RicianParams{-0.1}, {}, 1), Error);
  PathLossParams pl;
  pl.exponent_ub = 0.0;
  CHECK_THROWS_AS(generate_channel_set(d, {}, pl, {}, {}, 1), Error);
}
