// SPDX-License-Identifier: Apache-2.0
// Reference implementations used only by the tests. Each one recomputes a
// library quantity by a different route: explicit loops, LU inverses,
// brute-force enumeration or finite differences.
#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "rdars/types.hpp"

namespace oracle {

using rdars::cplx;
using rdars::MatrixXcd;
using rdars::MatrixXd;
using rdars::VectorXcd;
using rdars::VectorXd;

inline MatrixXcd lu_inverse(const MatrixXcd &m) { return Eigen::FullPivLU<MatrixXcd>(m).inverse(); }

/// Random complex Gaussian matrix with unit-variance entries.
inline MatrixXcd crandn(int rows, int cols, std::mt19937_64 &rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  MatrixXcd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      m(i, j) = scale * cplx(n(rng), n(rng));
    }
  }
  return m;
}

inline VectorXcd random_unit(int n, std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
  VectorXcd t(n);
  for (int i = 0; i < n; ++i) {
    t(i) = std::polar(1.0, u(rng));
  }
  return t;
}

/// Channel with O(1) entries and noise floors, so that conditioning is benign.
inline rdars::ChannelSet random_channel(int n_r, int m, int n, std::mt19937_64 &rng, double noise = 0.5) {
  rdars::ChannelSet ch;
  ch.h_direct = crandn(n_r, m, rng);
  ch.h_ris = crandn(n, m, rng);
  ch.g_bs = crandn(n, n_r, rng, 0.5);
  std::uniform_real_distribution<double> p(0.5, 2.0);
  ch.power = VectorXd(m);
  for (int i = 0; i < m; ++i) {
    ch.power(i) = p(rng);
  }
  ch.noise_bs = noise;
  ch.noise_conn = noise * 1.5;
  return ch;
}

/// H_b built term by term: H_d + sum over reflecting n of theta_n g_n^* h_n.
inline MatrixXcd bs_channel_loop(const rdars::ChannelSet &ch, const std::vector<int> &connected,
                                 const VectorXcd &theta) {
  MatrixXcd hb = ch.h_direct;
  for (int n = 0; n < ch.h_ris.rows(); ++n) {
    bool is_conn = false;
    for (int c : connected) {
      is_conn = is_conn || c == n;
    }
    if (is_conn) {
      continue;
    }
    for (int r = 0; r < hb.rows(); ++r) {
      for (int u = 0; u < hb.cols(); ++u) {
        hb(r, u) += std::conj(ch.g_bs(n, r)) * theta(n) * ch.h_ris(n, u);
      }
    }
  }
  return hb;
}

/// Tr MSE of the MMSE receiver from the explicit LU inverse of the received
/// covariance; connected is ascending.
inline double sum_mse_explicit(const rdars::ChannelSet &ch, const MatrixXcd &hb, const std::vector<int> &connected) {
  const int nr = static_cast<int>(hb.rows());
  const int a = static_cast<int>(connected.size());
  const int m = static_cast<int>(hb.cols());
  MatrixXcd h(nr + a, m);
  h.topRows(nr) = hb;
  for (int i = 0; i < a; ++i) {
    h.row(nr + i) = ch.h_ris.row(connected[static_cast<std::size_t>(i)]);
  }
  MatrixXcd p = MatrixXcd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    p(i, i) = std::sqrt(ch.power(i));
  }
  MatrixXcd lam = MatrixXcd::Zero(nr + a, nr + a);
  for (int i = 0; i < nr + a; ++i) {
    lam(i, i) = i < nr ? ch.noise_bs : ch.noise_conn;
  }
  const MatrixXcd hp = h * p;
  const MatrixXcd w = hp.adjoint() * lu_inverse(hp * hp.adjoint() + lam);
  const MatrixXcd e = w * hp - MatrixXcd::Identity(m, m);
  return (e * e.adjoint() + w * lam * w.adjoint()).trace().real();
}

/// Approximate objective: every element keeps reflecting.
inline double approx_explicit(const rdars::ChannelSet &ch, const std::vector<int> &connected, const VectorXcd &theta) {
  return sum_mse_explicit(ch, bs_channel_loop(ch, {}, theta), connected);
}

inline double exact_explicit(const rdars::ChannelSet &ch, const std::vector<int> &connected, const VectorXcd &theta) {
  return sum_mse_explicit(ch, bs_channel_loop(ch, connected, theta), connected);
}

/// Minimum of f over all a-subsets of {0..n-1}, enumerated by bitmask.
inline std::pair<std::vector<int>, double> brute_force_subsets(int n, int a,
                                                              const std::function<double(const std::vector<int> &)> &f) {
  std::vector<int> best;
  double best_val = INFINITY;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) != a) {
      continue;
    }
    std::vector<int> s;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        s.push_back(i);
      }
    }
    const double v = f(s);
    if (v < best_val) {
      best_val = v;
      best = s;
    }
  }
  return {best, best_val};
}

/// Central finite-difference gradient of a real function.
inline VectorXd fd_gradient(const std::function<double(const VectorXd &)> &f, const VectorXd &x, double h = 1e-6) {
  VectorXd g(x.size());
  for (int i = 0; i < x.size(); ++i) {
    VectorXd p = x;
    VectorXd m = x;
    p(i) += h;
    m(i) -= h;
    g(i) = (f(p) - f(m)) / (2.0 * h);
  }
  return g;
}

} // namespace oracle
