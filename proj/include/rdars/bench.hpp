// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rdars/channel.hpp"
#include "rdars/schemes.hpp"

namespace rdars {

enum class SweepAxis { PowerDbm, NElements, NConnected, RicianFactor };
std::string_view to_string(SweepAxis axis);
std::optional<SweepAxis> parse_sweep_axis(std::string_view name);

enum class Profile { Desk, Paper };
std::optional<Profile> parse_profile(std::string_view name);

struct ExperimentConfig {
  SystemDims dims{4, 4, 256, 4};
  Topology topo;
  PathLossParams pl;
  RicianParams ric;
  RadioParams radio;
  std::vector<SchemeId> schemes;
  SweepAxis sweep_axis = SweepAxis::PowerDbm;
  std::vector<double> sweep_values;
  int trials = 1;
  std::uint64_t base_seed = 1;
  PddConfig pdd;
  AOConfig ao;
  DasPlacement das_placement = DasPlacement::Greedy;
  double exhaustive_cap = kDefaultExhaustiveCap;
  int threads = 0;     ///< 0 picks the hardware concurrency
  bool timing = false; ///< wall_time_ms stays 0 unless set, keeping output byte-stable
  std::string output_path = "results.csv";

  /// Throws ErrorKind::Config listing every violated invariant.
  void validate() const;
  /// Desk: 64 elements, 50 trials. Paper: 256 elements, 300 trials.
  void apply_profile(Profile p);
};

/// Parses the JSON config schema documented in the README. Unknown keys and
/// type errors are all reported together in one ErrorKind::Config.
ExperimentConfig parse_config_text(std::string_view text);
ExperimentConfig parse_config(const std::string &path);
/// Resolved config as JSON text (also written next to the CSV).
std::string config_to_json(const ExperimentConfig &cfg);

struct ResultRecord {
  std::string scheme;
  double sweep_value = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  double anmse = 0.0;
  double objective_exact = 0.0;
  double objective_approx = 0.0;
  int iterations = 0;
  bool converged = false;
  double wall_time_ms = 0.0;
  std::uint64_t channel_hash = 0;
  std::string status = "ok";

  friend bool operator==(const ResultRecord &, const ResultRecord &) = default;
};

/// Per-iteration trace of the iterative schemes. Fields that do not apply
/// to a scheme are NaN.
struct DiagnosticRecord {
  std::string scheme;
  double sweep_value = 0.0;
  int trial = 0;
  int iter = 0;
  double objective = 0.0;
  double violation = 0.0;
  double rho = 0.0;
  double lambda = 0.0;
  double nu = 0.0;
};

struct ExperimentOutput {
  std::vector<ResultRecord> records;
  std::vector<DiagnosticRecord> diagnostics;
};

/// Seed of one Monte-Carlo cell: a splitmix64 mix of the base seed and the
/// cell coordinates.
std::uint64_t cell_seed(std::uint64_t base_seed, double sweep_value, int trial);
/// Independent child stream of a cell seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Channel inputs of a cell after applying the sweep value.
struct CellSetup {
  SystemDims dims;
  RicianParams ric;
  RadioParams radio;
};
CellSetup cell_setup(const ExperimentConfig &cfg, double sweep_value);

/// Runs every (sweep value, trial) cell on a worker pool. Output is sorted by
/// (sweep value, trial, scheme) so it does not depend on scheduling.
ExperimentOutput run_experiment(const ExperimentConfig &cfg, bool collect_diagnostics = false);

std::string format_double(double v);
std::string csv_text(const std::vector<ResultRecord> &records);
void emit_csv(const std::vector<ResultRecord> &records, const std::string &path);
std::vector<ResultRecord> parse_csv_text(std::string_view text);
std::vector<ResultRecord> parse_csv(const std::string &path);
std::string diagnostics_csv_text(const std::vector<DiagnosticRecord> &records);

/// Mean ANMSE per (scheme, sweep value) over the successful records.
struct SchemeMean {
  std::string scheme;
  double sweep_value = 0.0;
  double mean_anmse = 0.0;
  int count = 0;
};
std::vector<SchemeMean> summarize(const std::vector<ResultRecord> &records);

} // namespace rdars
