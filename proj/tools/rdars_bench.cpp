// SPDX-License-Identifier: Apache-2.0
// Monte-Carlo runner: rdars_bench run --config cfg.json [--profile desk] [--out results.csv]
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "rdars/bench.hpp"
#include "rdars/error.hpp"

namespace {

int report_error(std::string_view kind, const std::string &message, int code) {
  nlohmann::json line = {{"error", kind}, {"message", message}};
  std::cerr << line.dump() << '\n';
  return code;
}

void write_text(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.flush();
  if (!out) {
    throw rdars::Error(rdars::ErrorKind::Io, "cannot write " + path);
  }
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Monte-Carlo benchmark for RDARS-aided uplink receivers"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_path;
  std::optional<std::string> profile_name;
  std::optional<std::string> diagnostics_path;
  std::optional<int> threads;
  bool timing = false;
  bool summary = false;

  CLI::App *run = app.add_subcommand("run", "run every sweep value and trial of a config");
  run->add_option("--config", config_path, "JSON experiment config")->required()->check(CLI::ExistingFile);
  run->add_option("--trials", trials, "override the number of trials per sweep value");
  run->add_option("--seed", seed, "override the base seed");
  run->add_option("--out", out_path, "CSV output path");
  run->add_option("--profile", profile_name, "desk (64 elements, 50 trials) or paper (256, 300)")
      ->check(CLI::IsMember({"desk", "paper"}));
  run->add_option("--diagnostics", diagnostics_path, "per-iteration CSV of the iterative schemes");
  run->add_option("--threads", threads, "worker threads (0 = all cores)");
  run->add_flag("--timing", timing, "record wall time per scheme (output is no longer byte-stable)");
  run->add_flag("--summary", summary, "print mean ANMSE per scheme and sweep value");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    return report_error("usage", e.what(), 2);
  }

  try {
    rdars::ExperimentConfig cfg = rdars::parse_config(config_path);
    if (profile_name) {
      cfg.apply_profile(*rdars::parse_profile(*profile_name));
    }
    if (trials) {
      cfg.trials = *trials;
    }
    if (seed) {
      cfg.base_seed = *seed;
    }
    if (out_path) {
      cfg.output_path = *out_path;
    }
    if (threads) {
      cfg.threads = *threads;
    }
    cfg.timing = cfg.timing || timing;
    cfg.validate();

    const rdars::ExperimentOutput res = rdars::run_experiment(cfg, diagnostics_path.has_value());
    rdars::emit_csv(res.records, cfg.output_path);
    write_text(cfg.output_path + ".meta.json", rdars::config_to_json(cfg));
    if (diagnostics_path) {
      write_text(*diagnostics_path, rdars::diagnostics_csv_text(res.diagnostics));
    }
    if (summary) {
      std::printf("%-12s %12s %12s %6s\n", "scheme", "sweep_value", "mean_anmse", "n");
      for (const auto &m : rdars::summarize(res.records)) {
        std::printf("%-12s %12.6g %12.6g %6d\n", m.scheme.c_str(), m.sweep_value, m.mean_anmse, m.count);
      }
    }
    std::fprintf(stderr, "wrote %zu records to %s\n", res.records.size(), cfg.output_path.c_str());
  } catch (const rdars::Error &e) {
    return report_error(rdars::to_string(e.kind()), e.what(), e.kind() == rdars::ErrorKind::Config ? 2 : 1);
  } catch (const std::exception &e) {
    return report_error("internal", e.what(), 1);
  }
  return 0;
}
