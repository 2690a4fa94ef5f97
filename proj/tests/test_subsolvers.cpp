// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "rdars/error.hpp"
#include "rdars/subsolvers.hpp"

using namespace rdars;

namespace {

MatrixXd random_psd(int n, std::mt19937_64 &rng, int rank) {
  std::normal_distribution<double> g;
  const MatrixXd a = MatrixXd::NullaryExpr(n, rank, [&] { return g(rng); });
  return a * a.transpose();
}

VectorXd random_vec(int n, std::mt19937_64 &rng, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  return VectorXd::NullaryExpr(n, [&] { return g(rng); });
}

// Box QP by enumerating every face: each coordinate pinned at 0, pinned at 1,
// or free. The free block is solved from its stationarity condition.
double box_qp_by_faces(const BoxQP &p) {
  const int n = static_cast<int>(p.c.size());
  int faces = 1;
  for (int i = 0; i < n; ++i) {
    faces *= 3;
  }
  double best = INFINITY;
  for (int f = 0; f < faces; ++f) {
    VectorXd x = VectorXd::Zero(n);
    std::vector<int> free;
    int code = f;
    for (int i = 0; i < n; ++i) {
      const int s = code % 3;
      code /= 3;
      if (s == 1) {
        x(i) = 1.0;
      } else if (s == 2) {
        free.push_back(i);
      }
    }
    if (!free.empty()) {
      const int k = static_cast<int>(free.size());
      MatrixXd qf(k, k);
      VectorXd rhs(k);
      for (int i = 0; i < k; ++i) {
        rhs(i) = -p.c(free[i]);
        for (int j = 0; j < n; ++j) {
          if (std::find(free.begin(), free.end(), j) == free.end()) {
            rhs(i) -= 2.0 * p.q(free[i], j) * x(j);
          }
        }
        for (int j = 0; j < k; ++j) {
          qf(i, j) = 2.0 * p.q(free[i], free[j]);
        }
      }
      const VectorXd xf = qf.completeOrthogonalDecomposition().solve(rhs);
      for (int i = 0; i < k; ++i) {
        x(free[i]) = xf(i);
      }
    }
    if ((x.array() < -1e-12).any() || (x.array() > 1.0 + 1e-12).any()) {
      continue;
    }
    best = std::min(best, p.objective(x));
  }
  return best;
}

PhaseProblem random_phase_problem(int n_r, int m, int n, std::mt19937_64 &rng) {
  PhaseProblem p;
  p.direct = oracle::crandn(n_r, m, rng);
  p.reflect = oracle::crandn(n, n_r, rng, 0.5);
  p.reflect.row(0).setZero();
  p.hp = oracle::crandn(n, m, rng);
  p.noise_bs = 0.7;
  const MatrixXcd b = oracle::crandn(m, m, rng, 0.3);
  p.c_mat = MatrixXcd::Identity(m, m) + b * b.adjoint();
  return p;
}

// Quadratic model from the scratch: theta^H A theta - 2 Re theta^H b.
double majorizer_model(const MMScratch &s, const VectorXcd &t) {
  const MatrixXcd a = s.v_mat.transpose().cwiseProduct(s.u_mat);
  const VectorXcd b = s.d_mat.diagonal().conjugate();
  return (t.adjoint() * a * t)(0, 0).real() - 2.0 * t.dot(b).real();
}

} // namespace

TEST_CASE("box and ball projections") {
  VectorXd x(3);
  x << -0.5, 0.3, 1.7;
  CHECK(project_box(x) == VectorXd((VectorXd(3) << 0.0, 0.3, 1.0).finished()));

  std::mt19937_64 rng(1);
  for (int t = 0; t < 20; ++t) {
    const VectorXd v = random_vec(5, rng, 3.0);
    const VectorXd p = project_ball(v, 5);
    const double r = (2.0 * p.array() - 1.0).matrix().norm();
    CHECK(r <= std::sqrt(5.0) + 1e-12);
    if ((2.0 * v.array() - 1.0).matrix().norm() <= std::sqrt(5.0)) {
      CHECK((p - v).norm() == 0.0);
    } else {
      CHECK(r == doctest::Approx(std::sqrt(5.0)));
      // Obtuse angle with every other feasible point.
      const VectorXd other = project_ball(random_vec(5, rng, 1.0), 5);
      CHECK((v - p).dot(other - p) <= 1e-10);
    }
  }
}

TEST_CASE("box QP reaches the face-enumeration optimum") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 40; ++t) {
    BoxQP p{random_psd(5, rng, 1 + t % 5), random_vec(5, rng, 2.0)};
    const auto r = solve_box_qp(p, VectorXd::Constant(5, 0.5), {1e-10, 20000});
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(box_qp_by_faces(p)).epsilon(1e-6).scale(1.0));
    CHECK(project_box(r.x) == r.x);
    for (std::size_t k = 1; k < r.history.size(); ++k) {
      CHECK(r.history[k] <= r.history[k - 1] + 1e-12);
    }
  }
}

TEST_CASE("box QP with zero quadratic picks the sign pattern of c") {
  BoxQP p{MatrixXd::Zero(3, 3), (VectorXd(3) << 1.0, -2.0, 0.5).finished()};
  const auto r = solve_box_qp(p, VectorXd::Constant(3, 0.5));
  CHECK(r.x(0) == doctest::Approx(0.0));
  CHECK(r.x(1) == doctest::Approx(1.0));
  CHECK(r.x(2) == doctest::Approx(0.0));
}

TEST_CASE("box QP rejects indefinite or asymmetric Q") {
  BoxQP p{MatrixXd::Identity(2, 2), VectorXd::Zero(2)};
  p.q(1, 1) = -1.0;
  CHECK_THROWS_AS(solve_box_qp(p, VectorXd::Zero(2)), Error);
  p.q = MatrixXd::Identity(2, 2);
  p.q(0, 1) = 0.5;
  CHECK_THROWS_AS(solve_box_qp(p, VectorXd::Zero(2)), Error);
  p.q = MatrixXd::Identity(2, 2);
  CHECK_THROWS_AS(solve_box_qp(p, VectorXd::Zero(3)), Error);
}

TEST_CASE("ball solver on a quadratic recovers the projection of its center") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 10; ++t) {
    const VectorXd center = random_vec(6, rng, 2.0);
    BallProblem p{[&](const VectorXd &v) -> std::optional<ValueGrad> {
      return ValueGrad{(v - center).squaredNorm(), 2.0 * (v - center)};
    }};
    const auto r = solve_ball_trace_inverse(p, VectorXd::Constant(6, 0.5), {1e-14, 5000});
    CHECK((r.x - project_ball(center, 6)).cwiseAbs().maxCoeff() < 1e-5);
  }
}

TEST_CASE("ball solver on a trace-inverse objective is stationary and monotone") {
  std::mt19937_64 rng(4);
  const int n = 5;
  const MatrixXcd h = oracle::crandn(n, 3, rng);
  // f(v) = Tr{(I + H^H diag(v + 1) H)^{-1}}, convex in v and PD for v > -1.
  const auto f = [&](const VectorXd &v) -> std::optional<ValueGrad> {
    if ((v.array() <= -1.0).any()) {
      return std::nullopt;
    }
    const MatrixXcd k = MatrixXcd::Identity(3, 3) + h.adjoint() * (v.array() + 1.0).matrix().asDiagonal() * h;
    const MatrixXcd ki = oracle::lu_inverse(k);
    const MatrixXcd ki2 = ki * ki;
    VectorXd g(n);
    for (int i = 0; i < n; ++i) {
      g(i) = -(h.row(i) * ki2 * h.row(i).adjoint())(0, 0).real();
    }
    return ValueGrad{ki.trace().real(), g};
  };
  // Gradient against finite differences first.
  const VectorXd v0 = VectorXd::Constant(n, 0.3);
  const VectorXd fd = oracle::fd_gradient([&](const VectorXd &v) { return f(v)->value; }, v0);
  CHECK((fd - f(v0)->gradient).cwiseAbs().maxCoeff() < 1e-6);

  const auto r = solve_ball_trace_inverse(BallProblem{f}, v0, {1e-13, 5000});
  for (std::size_t k = 1; k < r.history.size(); ++k) {
    CHECK(r.history[k] <= r.history[k - 1]);
  }
  const VectorXd g = f(r.x)->gradient;
  const VectorXd step = project_ball(r.x - 1e-2 * g, n);
  CHECK((step - r.x).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("ball solver refuses a start outside the domain") {
  BallProblem p{[](const VectorXd &) -> std::optional<ValueGrad> { return std::nullopt; }};
  try {
    solve_ball_trace_inverse(p, VectorXd::Zero(2));
    FAIL("expected NotPositiveDefinite");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::NotPositiveDefinite);
  }
}

TEST_CASE("phase majorizer upper-bounds the objective and is tight at the anchor") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 10; ++t) {
    const auto p = random_phase_problem(3, 2, 6, rng);
    const PhaseVector anchor(oracle::random_unit(6, rng));
    const auto s = p.scratch_at(anchor);
    const double f0 = p.objective(anchor);
    const double m0 = majorizer_model(s, anchor.values());
    for (int k = 0; k < 20; ++k) {
      const VectorXcd th = oracle::random_unit(6, rng);
      const double gap = (majorizer_model(s, th) - m0) - (p.objective(PhaseVector(th)) - f0);
      CHECK(gap >= -1e-10);
    }
  }
}

TEST_CASE("MM phase steps keep unit modulus and never increase the objective") {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 5; ++t) {
    const auto p = random_phase_problem(4, 3, 8, rng);
    PhaseVector th(oracle::random_unit(8, rng));
    double prev = p.objective(th);
    for (int k = 0; k < 60; ++k) {
      th = mm_phase_step(p.scratch_at(th), th);
      const double cur = p.objective(th);
      CHECK(cur <= prev * (1.0 + 1e-12));
      prev = cur;
    }
    CHECK((th.values().cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("MM step leaves an element with zero reflecting row unchanged") {
  std::mt19937_64 rng(7);
  const auto p = random_phase_problem(2, 2, 4, rng);
  const PhaseVector th(oracle::random_unit(4, rng));
  const PhaseVector next = mm_phase_step(p.scratch_at(th), th);
  CHECK(std::abs(next[0] - th[0]) < 1e-14);
}

TEST_CASE("eigen split reconstructs the matrix with signed parts") {
  std::mt19937_64 rng(8);
  const MatrixXd a = MatrixXd::NullaryExpr(6, 6, [&] { return std::normal_distribution<double>()(rng); });
  const MatrixXd s = a + a.transpose();
  const auto sp = eig_split(s);
  CHECK((sp.psd + sp.nsd - s).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(Eigen::SelfAdjointEigenSolver<MatrixXd>(sp.psd).eigenvalues().minCoeff() > -1e-12);
  CHECK(Eigen::SelfAdjointEigenSolver<MatrixXd>(sp.nsd).eigenvalues().maxCoeff() < 1e-12);
}

TEST_CASE("hand-sized projection, box QP and eigen split") {
  const VectorXd v = project_ball(VectorXd::Constant(4, 1.2), 4);
  CHECK((2.0 * v.array() - 1.0).matrix().norm() == doctest::Approx(2.0));
  CHECK(v.isApprox(VectorXd::Ones(4)));

  BoxQP p{MatrixXd::Identity(2, 2), -2.0 * Eigen::Vector2d(2.0, -1.0)};
  const auto r = solve_box_qp(p, VectorXd::Constant(2, 0.5));
  CHECK(r.x(0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::abs(r.x(1)) < 1e-8);

  const auto s = eig_split(Eigen::Vector2d(1.0, -2.0).asDiagonal());
  CHECK(s.psd.isApprox(Eigen::Vector2d(1.0, 0.0).asDiagonal().toDenseMatrix()));
  CHECK(s.nsd.isApprox(Eigen::Vector2d(0.0, -2.0).asDiagonal().toDenseMatrix()));
}
