// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rdars/greedy.hpp"
#include "rdars/pdd.hpp"
#include "rdars/types.hpp"

namespace rdars {

enum class SchemeId { PassiveRIS, DAS, RandomIndex, FixedIndex, GSRand, GSAO, IBCDPDD, Exhaustive };

std::string_view to_string(SchemeId id);
std::optional<SchemeId> parse_scheme(std::string_view name);

enum class DasPlacement { Greedy, Fixed };
std::string_view to_string(DasPlacement p);
std::optional<DasPlacement> parse_das_placement(std::string_view name);

enum class ObjectiveKind { Exact, Approx };

inline constexpr double kDefaultExhaustiveCap = 1e5;

struct SchemeResult {
  SchemeId id = SchemeId::PassiveRIS;
  ModeSelection selection;
  PhaseVector theta;
  double objective_exact = 0.0;  ///< sum-MSE at the MMSE receiver
  double objective_approx = 0.0; ///< full-reflection approximation (exact value for DAS)
  int iterations = 0;
  bool converged = true;
  std::vector<PddOuterRecord> pdd_trace; ///< IBCDPDD only
  std::vector<double> ao_trace;          ///< GSAO and PassiveRIS only
};

/// Everything a scheme may consume besides the channel. All schemes of one
/// Monte-Carlo cell share theta0.
struct SchemeContext {
  PhaseVector theta0;
  std::uint64_t seed = 0; ///< drives the Random Index draw
  PddConfig pdd;
  AOConfig ao;
  DasPlacement das_placement = DasPlacement::Greedy;
  double exhaustive_cap = kDefaultExhaustiveCap;
};

/// Uniform phases in [0, 2pi) from a dedicated generator.
PhaseVector random_phases(int n, std::uint64_t seed);
/// Uniformly drawn a-subset.
ModeSelection random_selection(int n, int a, std::uint64_t seed);

/// C(n, k) in floating point (exact below 2^53).
double binomial(int n, int k);

/// Exact single-user objective at a given selection and phases.
double p8_objective(const ChannelSet &ch, const ModeSelection &sel, const PhaseVector &ph);

SchemeResult scheme_passive_ris(const ChannelSet &ch, const SystemDims &dims, const SchemeContext &ctx);
SchemeResult scheme_das(const ChannelSet &ch, const SystemDims &dims, DasPlacement placement);
SchemeResult scheme_random_index(const ChannelSet &ch, const SystemDims &dims, const SchemeContext &ctx);
SchemeResult scheme_fixed_index(const ChannelSet &ch, const SystemDims &dims, const SchemeContext &ctx);
SchemeResult scheme_gs_rand(const ChannelSet &ch, const SystemDims &dims, const SchemeContext &ctx);
SchemeResult scheme_gs_ao(const ChannelSet &ch, const SystemDims &dims, const SchemeContext &ctx);
SchemeResult scheme_ibcd_pdd(const ChannelSet &ch, const SystemDims &dims, const SchemeContext &ctx);
/// Best selection at theta0 on the exact objective, phases kept at theta0.
SchemeResult scheme_exhaustive(const ChannelSet &ch, const SystemDims &dims, const SchemeContext &ctx);

SchemeResult run_scheme(SchemeId id, const ChannelSet &ch, const SystemDims &dims, const SchemeContext &ctx);

/// Minimizer over all a-subsets in lexicographic order at fixed phases; the
/// first minimizer wins. Throws CapExceeded when C(N, a) > cap.
std::pair<ModeSelection, double> exhaustive_search(const ChannelSet &ch, const SystemDims &dims,
                                                   const PhaseVector &ph, ObjectiveKind kind,
                                                   double cap = kDefaultExhaustiveCap);

/// Single-antenna, single-user closed form: the a strongest surface links are
/// connected and every phase aligns its reflected path with the direct link.
std::pair<ModeSelection, PhaseVector> siso_closed_form(const ChannelSet &ch, int a);

/// Single-user phases when the surface-BS link is rank one and the user-surface
/// link has constant modulus. Connected entries are set to 1.
PhaseVector los_closed_form(const ChannelSet &ch, const ModeSelection &sel);

} // namespace rdars
