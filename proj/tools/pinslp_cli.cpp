// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pinslp Authors
//
// pinslp run --experiment power-vs-sinr --config cfg.json --out results.csv

#include <cmath>
#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "pinslp/experiment.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kAllInfeasible = 3;

void print_summary(const std::vector<pinslp::ExperimentRecord>& records) {
  std::printf("%-13s %8s %4s %14s %12s %9s\n", "scheme", "gamma_db", "L", "mean_power_w",
              "mean_dbm", "feasible");
  for (const auto& row : pinslp::summarize(records)) {
    const double dbm = std::isfinite(row.mean_power_w) ? pinslp::watts_to_dbm(row.mean_power_w)
                                                       : std::nan("");
    std::printf("%-13s %8.2f %4d %14.6e %12.4f %5d/%-3d\n",
                std::string(pinslp::scheme_name(row.scheme)).c_str(), row.gamma_db, row.num_pas,
                row.mean_power_w, dbm, row.feasible, row.trials);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Power minimisation for pinching-antenna downlinks with symbol-level precoding"};
  app.require_subcommand(1);

  CLI::App* run = app.add_subcommand("run", "Run a seeded Monte Carlo experiment");
  std::string config_path;
  std::string experiment;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string out_path = "results.csv";
  bool serial = false;
  bool quiet = false;
  run->add_option("--config", config_path, "JSON configuration file (defaults apply when omitted)")
      ->check(CLI::ExistingFile);
  run->add_option("--experiment", experiment, "power-vs-sinr | power-vs-numpas | convergence")
      ->required()
      ->check(CLI::IsMember({"power-vs-sinr", "power-vs-numpas", "convergence"}));
  run->add_option("--trials", trials, "Override the trial count")->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "Override the master seed");
  run->add_option("--out", out_path, "CSV output path");
  run->add_option("--threads", threads, "Worker threads for trials")->check(CLI::PositiveNumber);
  run->add_flag("--serial", serial, "Run trials on the calling thread only");
  run->add_flag("--quiet", quiet, "Skip the summary table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  pinslp::ExperimentConfig cfg;
  pinslp::ExperimentKind kind;
  try {
    if (!config_path.empty()) cfg = pinslp::load_config(config_path);
    if (trials) cfg.trials = *trials;
    if (seed) cfg.master_seed = *seed;
    if (threads) cfg.threads = *threads;
    kind = pinslp::parse_experiment(experiment);
    cfg.validate();
    cfg.resolved_num_pas(kind);
    cfg.resolved_gamma_db(kind);
  } catch (const std::exception& e) {
    std::cerr << "pinslp: " << e.what() << '\n';
    return kConfigError;
  }

  std::vector<pinslp::ExperimentRecord> records;
  try {
    records = pinslp::run_experiment(
        cfg, kind, serial ? pinslp::ExecutionMode::kSerial : pinslp::ExecutionMode::kParallel);
    pinslp::emit_csv(records, out_path);
  } catch (const std::exception& e) {
    std::cerr << "pinslp: " << e.what() << '\n';
    return 1;
  }

  if (!quiet) {
    print_summary(records);
    std::printf("wrote %zu records to %s\n", records.size(), out_path.c_str());
  }

  bool any_feasible = false;
  for (const auto& r : records) any_feasible = any_feasible || r.feasible;
  if (!any_feasible) {
    std::cerr << "pinslp: every trial was infeasible\n";
    return kAllInfeasible;
  }
  return 0;
}
