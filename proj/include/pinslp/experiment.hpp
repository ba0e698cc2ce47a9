// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pinslp Authors
//
// Seeded Monte Carlo experiments comparing the jointly optimised placement
// with fixed, random and conventional-array baselines.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pinslp/ao.hpp"
#include "pinslp/geometry.hpp"
#include "pinslp/signal.hpp"

namespace pinslp {

enum class Scheme { kProposed, kFixed, kRandom, kConventional };
enum class ExperimentKind { kPowerVsSinr, kPowerVsNumPas, kConvergence };
enum class ExecutionMode { kSerial, kParallel };

std::string_view scheme_name(Scheme s);
Scheme parse_scheme(std::string_view name);
std::string_view experiment_name(ExperimentKind k);
ExperimentKind parse_experiment(std::string_view name);

struct ExperimentConfig {
  double carrier_freq = 2.8e10;  // Hz
  double n_eff = 1.4;
  double noise_dbm = -80.0;
  double region_side = 20.0;  // m
  double height = 5.0;        // m
  int num_waveguides = 4;
  int num_users = 4;
  int modulation_order = 4;
  // Unset sweeps take the per-experiment defaults (see resolved_num_pas / resolved_gamma_db).
  std::optional<std::vector<int>> num_pas;
  std::optional<std::vector<double>> gamma_db;
  double waveguide_length = 20.0;    // m
  std::optional<double> min_spacing; // m; half a free-space wavelength when unset
  int trials = 50;
  std::uint64_t master_seed = 1;
  std::vector<Scheme> schemes{Scheme::kProposed, Scheme::kFixed, Scheme::kRandom,
                              Scheme::kConventional};
  SolverSettings solver;
  int threads = 0;  // 0 keeps the OpenMP default

  WaveformParams waveform() const { return WaveformParams::from_carrier(carrier_freq, n_eff); }
  double spacing() const;
  double noise_power() const { return dbm_to_watts(noise_dbm); }
  double theta_th() const;

  std::vector<int> resolved_num_pas(ExperimentKind kind) const;
  std::vector<double> resolved_gamma_db(ExperimentKind kind) const;

  // Throws std::invalid_argument on non-physical values.
  void validate() const;
};

// Parses a JSON document; unknown keys are rejected.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::string& path);

struct Scenario {
  SystemGeometry geom;  // pas_per_waveguide is set per sweep point
  SymbolVector symbols;
  std::uint64_t seed = 0;
};

std::uint64_t trial_seed(std::uint64_t master_seed, int trial);

Scenario generate_scenario(const ExperimentConfig& cfg, int trial);

struct ExperimentRecord {
  std::string experiment;
  int trial = 0;
  std::uint64_t seed = 0;
  Scheme scheme = Scheme::kFixed;
  double gamma_db = 0.0;
  int num_pas = 0;
  double power_w = 0.0;
  double power_dbm = 0.0;
  int ao_iters = 0;  // iteration index for convergence traces
  bool converged = false;

  // Not written to CSV; kept for post-run verification.
  bool feasible = false;
  double min_margin = 0.0;
  bool placement_valid = true;
};

std::vector<ExperimentRecord> run_power_vs_sinr(const ExperimentConfig& cfg,
                                                ExecutionMode mode = ExecutionMode::kParallel);
std::vector<ExperimentRecord> run_power_vs_numpas(const ExperimentConfig& cfg,
                                                  ExecutionMode mode = ExecutionMode::kParallel);
std::vector<ExperimentRecord> run_convergence(const ExperimentConfig& cfg,
                                              ExecutionMode mode = ExecutionMode::kParallel);
std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& cfg, ExperimentKind kind,
                                             ExecutionMode mode = ExecutionMode::kParallel);

struct SummaryRow {
  Scheme scheme = Scheme::kFixed;
  double gamma_db = 0.0;
  int num_pas = 0;
  double mean_power_w = 0.0;
  int trials = 0;
  int feasible = 0;
};

// Mean power of feasible records per (scheme, gamma, L).
std::vector<SummaryRow> summarize(const std::vector<ExperimentRecord>& records);

inline constexpr std::string_view kCsvHeader =
    "experiment,trial,seed,scheme,gamma_db,num_pas,power_w,power_dbm,ao_iters,converged";

void write_csv(const std::vector<ExperimentRecord>& records, std::ostream& os);
// Throws std::runtime_error with the path on I/O failure.
void emit_csv(const std::vector<ExperimentRecord>& records, const std::string& path);
std::vector<ExperimentRecord> read_csv(std::istream& is);

}  // namespace pinslp
