// SPDX-License-Identifier: Apache-2.0
#include "rdars/schemes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "rdars/error.hpp"
#include "rdars/model.hpp"

namespace rdars {

namespace {

constexpr std::array<std::string_view, 8> kSchemeNames = {"PassiveRIS", "DAS",  "RandomIndex", "FixedIndex",
                                                          "GSRand",     "GSAO", "IBCDPDD",     "Exhaustive"};

SchemeResult finish(SchemeId id, const ChannelSet &ch, ModeSelection sel, PhaseVector theta) {
  SchemeResult r;
  r.id = id;
  r.objective_exact = reduced_objective(ch, sel, theta);
  r.objective_approx = approx_objective(ch, sel, theta);
  r.selection = std::move(sel);
  r.theta = std::move(theta);
  return r;
}

SchemeResult with_p9_phases(SchemeId id, const ChannelSet &ch, ModeSelection sel, const SchemeContext &ctx) {
  std::vector<double> trace;
  PhaseVector theta = phase_optimize_p9(ch, sel, ctx.theta0, ctx.ao.mm_iters_p9, ctx.ao.mm_rel_tol, &trace);
  SchemeResult r = finish(id, ch, std::move(sel), std::move(theta));
  r.iterations = static_cast<int>(trace.size()) - 1;
  r.converged = r.iterations < ctx.ao.mm_iters_p9;
  return r;
}

void require_single_user(const ChannelSet &ch, const char *what) {
  ch.validate();
  if (ch.n_users() != 1) {
    throw Error(ErrorKind::InvalidInput, std::string(what) + ": expects a single user");
  }
}

} // namespace

std::string_view to_string(SchemeId id) { return kSchemeNames.at(static_cast<std::size_t>(id)); }

std::optional<SchemeId> parse_scheme(std::string_view name) {
  for (std::size_t i = 0; i < kSchemeNames.size(); ++i) {
    if (kSchemeNames[i] == name) {
      return static_cast<SchemeId>(i);
    }
  }
  return std::nullopt;
}

std::string_view to_string(DasPlacement p) { return p == DasPlacement::Greedy ? "greedy" : "fixed"; }

std::optional<DasPlacement> parse_das_placement(std::string_view name) {
  if (name == "greedy") {
    return DasPlacement::Greedy;
  }
  if (name == "fixed") {
    return DasPlacement::Fixed;
  }
  return std::nullopt;
}

PhaseVector random_phases(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  VectorXd a(n);
  for (int i = 0; i < n; ++i) {
    a(i) = angle(rng);
  }
  return PhaseVector::from_angles(a);
}

ModeSelection random_selection(int n, int a, std::uint64_t seed) {
  if (a < 0 || a > n) {
    throw Error(ErrorKind::InvalidInput, "random_selection: a out of range");
  }
  std::mt19937_64 rng(seed);
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  // Partial Fisher-Yates.
  for (int i = 0; i < a; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
  }
  idx.resize(static_cast<std::size_t>(a));
  return ModeSelection::from_indices(n, std::move(idx));
}

double binomial(int n, int k) {
  if (k < 0 || k > n) {
    return 0.0;
  }
  k = std::min(k, n - k);
  double c = 1.0;
  for (int i = 1; i <= k; ++i) {
    c = c * (n - k + i) / i;
  }
  return std::round(c);
}

double p8_objective(const ChannelSet &ch, const ModeSelection &sel, const PhaseVector &ph) {
  require_single_user(ch, "p8_objective");
  return reduced_objective(ch, sel, ph);
}

SchemeResult scheme_passive_ris(const ChannelSet &ch, const SystemDims &dims, const SchemeContext &ctx) {
  SystemDims d = dims;
  d.n_connected = 0;
  const AOResult ao = run_ao(ch, d, ctx.ao, ctx.theta0);
  SchemeResult r = finish(SchemeId::PassiveRIS, ch, ao.selection, ao.theta);
  r.iterations = ao.rounds;
  r.converged = ao.converged;
  r.ao_trace = ao.trace;
  return r;
}

SchemeResult scheme_das(const ChannelSet &ch, const SystemDims &dims, DasPlacement placement) {
  ch.validate(dims);
  ModeSelection sel = placement == DasPlacement::Greedy ? greedy_das_select(ch, dims)
                                                        : ModeSelection::first(dims.n_elements, dims.n_connected);
  SchemeResult r;
  r.id = SchemeId::DAS;
  r.objective_exact = reduced_objective(assemble_das_channel(ch, sel), ch.power);
  r.objective_approx = r.objective_exact;
  r.selection = std::move(sel);
  r.theta = PhaseVector::ones(dims.n_elements);
  return r;
}

SchemeResult scheme_random_index(const ChannelSet &ch, const SystemDims &dims, const SchemeContext &ctx) {
  return with_p9_phases(SchemeId::RandomIndex, ch, random_selection(dims.n_elements, dims.n_connected, ctx.seed),
                        ctx);
}

SchemeResult scheme_fixed_index(const ChannelSet &ch, const SystemDims &dims, const SchemeContext &ctx) {
  return with_p9_phases(SchemeId::FixedIndex, ch, ModeSelection::first(dims.n_elements, dims.n_connected), ctx);
}

SchemeResult scheme_gs_rand(const ChannelSet &ch, const SystemDims &dims, const SchemeContext &ctx) {
  return finish(SchemeId::GSRand, ch, greedy_mode_select(ch, ctx.theta0, dims), ctx.theta0);
}

SchemeResult scheme_gs_ao(const ChannelSet &ch, const SystemDims &dims, const SchemeContext &ctx) {
  const AOResult ao = run_ao(ch, dims, ctx.ao, ctx.theta0);
  SchemeResult r = finish(SchemeId::GSAO, ch, ao.selection, ao.theta);
  r.iterations = ao.rounds;
  r.converged = ao.converged;
  r.ao_trace = ao.trace;
  return r;
}

SchemeResult scheme_ibcd_pdd(const ChannelSet &ch, const SystemDims &dims, const SchemeContext &ctx) {
  const PddResult pdd =
      run_pdd(ch, dims, ctx.pdd, ModeSelection::first(dims.n_elements, dims.n_connected), ctx.theta0);
  SchemeResult r = finish(SchemeId::IBCDPDD, ch, pdd.selection, pdd.theta);
  r.iterations = pdd.diag.total_sweeps;
  r.converged = pdd.diag.converged;
  r.pdd_trace = pdd.diag.outer;
  return r;
}

SchemeResult scheme_exhaustive(const ChannelSet &ch, const SystemDims &dims, const SchemeContext &ctx) {
  auto [sel, value] = exhaustive_search(ch, dims, ctx.theta0, ObjectiveKind::Exact, ctx.exhaustive_cap);
  (void)value;
  return finish(SchemeId::Exhaustive, ch, std::move(sel), ctx.theta0);
}

SchemeResult run_scheme(SchemeId id, const ChannelSet &ch, const SystemDims &dims, const SchemeContext &ctx) {
  switch (id) {
  case SchemeId::PassiveRIS:
    return scheme_passive_ris(ch, dims, ctx);
  case SchemeId::DAS:
    return scheme_das(ch, dims, ctx.das_placement);
  case SchemeId::RandomIndex:
    return scheme_random_index(ch, dims, ctx);
  case SchemeId::FixedIndex:
    return scheme_fixed_index(ch, dims, ctx);
  case SchemeId::GSRand:
    return scheme_gs_rand(ch, dims, ctx);
  case SchemeId::GSAO:
    return scheme_gs_ao(ch, dims, ctx);
  case SchemeId::IBCDPDD:
    return scheme_ibcd_pdd(ch, dims, ctx);
  case SchemeId::Exhaustive:
    return scheme_exhaustive(ch, dims, ctx);
  }
  throw Error(ErrorKind::InvalidInput, "run_scheme: unknown scheme");
}

std::pair<ModeSelection, double> exhaustive_search(const ChannelSet &ch, const SystemDims &dims,
                                                   const PhaseVector &ph, ObjectiveKind kind, double cap) {
  dims.validate();
  ch.validate(dims);
  const int n = dims.n_elements;
  const int a = dims.n_connected;
  if (binomial(n, a) > cap) {
    throw Error(ErrorKind::CapExceeded, "exhaustive_search: C(" + std::to_string(n) + ", " + std::to_string(a) +
                                            ") exceeds the subset cap");
  }
  auto eval = [&](const ModeSelection &s) {
    return kind == ObjectiveKind::Exact ? reduced_objective(ch, s, ph) : approx_objective(ch, s, ph);
  };

  std::vector<int> comb(static_cast<std::size_t>(a));
  std::iota(comb.begin(), comb.end(), 0);
  ModeSelection best = ModeSelection::from_indices(n, comb);
  double best_val = eval(best);
  while (true) {
    // Advance to the next combination in lexicographic order.
    int i = a - 1;
    while (i >= 0 && comb[static_cast<std::size_t>(i)] == n - a + i) {
      --i;
    }
    if (i < 0) {
      break;
    }
    ++comb[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < a; ++j) {
      comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
    }
    ModeSelection s = ModeSelection::from_indices(n, comb);
    const double v = eval(s);
    if (v < best_val) {
      best_val = v;
      best = std::move(s);
    }
  }
  return {best, best_val};
}

std::pair<ModeSelection, PhaseVector> siso_closed_form(const ChannelSet &ch, int a) {
  require_single_user(ch, "siso_closed_form");
  if (ch.n_bs_antennas() != 1) {
    throw Error(ErrorKind::InvalidInput, "siso_closed_form: expects a single BS antenna");
  }
  const int n = ch.n_elements();
  if (a < 0 || a > n) {
    throw Error(ErrorKind::InvalidInput, "siso_closed_form: a out of range");
  }
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return std::norm(ch.h_ris(i, 0)) > std::norm(ch.h_ris(j, 0)); });
  order.resize(static_cast<std::size_t>(a));

  const double arg_d = std::arg(ch.h_direct(0, 0));
  VectorXd angles(n);
  for (int i = 0; i < n; ++i) {
    angles(i) = arg_d + std::arg(ch.g_bs(i, 0)) - std::arg(ch.h_ris(i, 0));
  }
  return {ModeSelection::from_indices(n, std::move(order)), PhaseVector::from_angles(angles)};
}

PhaseVector los_closed_form(const ChannelSet &ch, const ModeSelection &sel) {
  constexpr double kRankTol = 1e-9;
  require_single_user(ch, "los_closed_form");
  const int n = ch.n_elements();
  if (sel.n_elements() != n) {
    throw_dimension_mismatch("mode selection", n, 1, sel.n_elements(), 1);
  }
  Eigen::JacobiSVD<MatrixXcd> svd(ch.g_bs, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VectorXd &s = svd.singularValues();
  if (s.size() == 0 || !(s(0) > 0.0) || (s.size() > 1 && s(1) > kRankTol * s(0))) {
    throw Error(ErrorKind::InvalidInput, "los_closed_form: surface-BS link is not rank one");
  }
  const VectorXd mod = ch.h_ris.col(0).cwiseAbs();
  if (mod.maxCoeff() - mod.minCoeff() > kRankTol * mod.maxCoeff()) {
    throw Error(ErrorKind::InvalidInput, "los_closed_form: user-surface link is not line of sight");
  }
  // G^H = s0 w u^H, so H_b = h_d + w * sum_n row_n theta_n.
  const VectorXcd u = svd.matrixU().col(0);
  const VectorXcd w = svd.matrixV().col(0);
  const double target = std::arg(w.dot(ch.h_direct.col(0)));
  VectorXd angles = VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    if (!sel.contains(i)) {
      const cplx row = s(0) * std::conj(u(i)) * ch.h_ris(i, 0);
      angles(i) = target - std::arg(row);
    }
  }
  return PhaseVector::from_angles(angles);
}

} // namespace rdars
