// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pinslp Authors
//
// Alternating optimisation of the precoder and the PA placement, plus the
// placements and channels used by the baseline schemes.

#pragma once

#include <cstdint>
#include <vector>

#include "pinslp/channel.hpp"
#include "pinslp/geometry.hpp"
#include "pinslp/placement.hpp"
#include "pinslp/precoder.hpp"

namespace pinslp {

// Per-user SINR targets and the CI geometry shared by all solves of a scenario.
struct LinkBudget {
  std::vector<double> gamma;  // linear SINR targets, one per user
  double noise_power = 1e-11; // W
  double theta_th = 0.0;      // CI half-angle (pi / M)
};

struct AOConfig {
  int max_iters = 25;
  double rel_tol = 1e-3;
  // Reject placements whose re-solved power exceeds the current power.
  bool guard_enabled = true;
  bool optimize_placement = true;
};

struct SolverSettings {
  AOConfig ao;
  SmoothingParams smoothing;
  PGDConfig pgd;
  QPSolverOptions qp;
  bool parallel_placement = true;
};

struct AOIterate {
  int iteration = 0;
  double power = 0.0;                // power after this iteration's accept/reject
  double candidate_power = 0.0;      // power at the proposed placement
  double placement_objective = 0.0;  // exact CI objective at the candidate placement
  double rel_change = 0.0;
  bool accepted = false;
};

struct AOTrace {
  double initial_power = 0.0;
  std::vector<AOIterate> iterations;
};

struct AOResult {
  BeamMatrix beams;
  PlacementMatrix placement;
  QPSolution precoder;
  AOTrace trace;
  bool converged = false;
};

// Throws std::runtime_error when the precoder is infeasible at the initial placement.
AOResult ao_solve(const SystemGeometry& geom, const WaveformParams& params,
                  const SymbolVector& symbols, const LinkBudget& link,
                  const PlacementMatrix& initial, const SolverSettings& settings);

// Precoder-only solve at a fixed placement.
QPSolution solve_at_placement(const SystemGeometry& geom, const WaveformParams& params,
                              const SymbolVector& symbols, const LinkBudget& link,
                              const PlacementMatrix& placement, const QPSolverOptions& options);

// x_{n,l} = (l + 1/2) * L^PA / L for zero-based l.
PlacementMatrix fixed_uniform_placement(const SystemGeometry& geom);

// One uniform draw inside each initial movable region.
PlacementMatrix random_placement(const SystemGeometry& geom, std::uint64_t seed);

// N conventional antennas at (i * lambda/2, side/2, d), one per RF chain.
ChannelSnapshot conventional_array_snapshot(const SystemGeometry& geom, const WaveformParams& params);

// Smallest CI margin over all users for precoded vector x on the given channels.
double min_ci_margin(const Eigen::MatrixXcd& effective, const SymbolVector& symbols,
                     const BeamMatrix& beams, const LinkBudget& link);

}  // namespace pinslp
