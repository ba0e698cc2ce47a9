// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pinslp Authors
//
// Placement update for fixed beamformers.
//
// With W fixed, the CI objective sum_k (|Im lambda_k| - tan(theta) Re lambda_k) is
// bounded above by a separable sum over PAs. For PA (n, l) at coordinate x and
// each pair of users (m, k):
//
//   q       = sqrt((x_k - x)^2 + (y_k - y_n)^2 + d^2)
//   f       = -beta0 q - beta1 x
//   g_im    = |w_{m,n}| / q * sin(f + angle(w_{m,n}) + angle(s_m) - angle(s_k))
//   g_re    = |w_{m,n}| / q * cos(...)
//
// and |g_im| - tan(theta) g_re is replaced by the log-sum-exp of the two
// branches phi_bar = g_im - t g_re and phi_hat = -g_im - t g_re. Each PA is then
// moved by projected gradient descent with Armijo backtracking inside a
// movable region that keeps the PAs of one waveguide ordered and spaced.

#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "pinslp/channel.hpp"
#include "pinslp/geometry.hpp"
#include "pinslp/signal.hpp"

namespace pinslp {

// Everything the single-PA objective needs for waveguide n. Terms are stored
// with index m * K + k.
struct SubproblemTerms {
  struct Term {
    double amplitude = 0.0;     // |w_{m,n}|
    double phase_offset = 0.0;  // angle(w_{m,n}) + angle(s_m) - angle(s_k)
    double user_x = 0.0;        // x_k
    double user_y = 0.0;        // y_k
  };
  std::vector<Term> terms;
  int num_users = 0;
  double waveguide_y = 0.0;
  double height = 0.0;
  double beta0 = 0.0;
  double beta1 = 0.0;
  double tan_theta = 1.0;

  const Term& term(int m, int k) const { return terms[static_cast<std::size_t>(m * num_users + k)]; }
};

SubproblemTerms make_subproblem_terms(const SystemGeometry& geom, int n, const BeamMatrix& beams,
                                      const SymbolVector& symbols, const WaveformParams& params,
                                      double theta_th);

struct GTerms {
  double im = 0.0;
  double re = 0.0;
};

struct PhiBranches {
  double bar = 0.0;  // g_im - t g_re
  double hat = 0.0;  // -g_im - t g_re
};

GTerms g_terms(const SubproblemTerms& terms, double x, int m, int k);
PhiBranches phi_branches(const SubproblemTerms& terms, double x, int m, int k);

// eps * log(exp(bar/eps) + exp(hat/eps)), evaluated around the larger branch.
double smooth_max(double a, double b, double eps);
double smooth_term(const SubproblemTerms& terms, double x, int m, int k, double eps);

double subproblem_objective(const SubproblemTerms& terms, double x, double eps);

// Analytic d/dx of subproblem_objective.
double subproblem_gradient(const SubproblemTerms& terms, double x, double eps);

// Branch derivatives for one (m, k) term.
PhiBranches phi_branch_derivatives(const SubproblemTerms& terms, double x, int m, int k);

struct SmoothingParams {
  bool adaptive = true;
  double epsilon = 1e-6;  // used when adaptive is false
  double kappa = 1e-3;
  double floor = 1e-15;
};

// eps = max(kappa * max_{m,k} max(|phi_bar|, |phi_hat|) at x, floor) when adaptive.
double resolve_epsilon(const SmoothingParams& smoothing, const SubproblemTerms& terms, double x);

struct PGDConfig {
  int max_iters = 200;
  double step_tol = 1e-6;
  double init_step = 0.1;
  double armijo_c1 = 1e-4;
  double shrink = 0.5;
  int max_backtracks = 40;
  // Extra evenly spaced starting points per region; the warm start is always used.
  int restarts = 0;
};

double project(double x, const MovableRegion& region);

// Backtracking on mu = init_step * shrink^i. Without a region the trial point
// is x - mu g and the test is f(trial) <= f(x) - c1 mu g^2. With a region the
// trial point is projected and the test becomes f(trial) <= f(x) - c1 g (x - trial).
// Returns 0 when no step is accepted.
double armijo_step(const std::function<double(double)>& objective, double gradient, double x,
                   const PGDConfig& cfg, const std::optional<MovableRegion>& region = std::nullopt);

struct PGDResult {
  double x = 0.0;
  double objective = 0.0;
  int iterations = 0;
  std::vector<double> history;  // objective after every accepted iterate, starting at x_init
};

PGDResult pgd_solve(const SubproblemTerms& terms, const MovableRegion& region, double eps,
                    const PGDConfig& cfg, double x_init);

// Optimises the PAs of waveguide n in order, each inside its updated region.
Eigen::VectorXd optimize_waveguide(const SystemGeometry& geom, int n, const Eigen::VectorXd& current,
                                   const BeamMatrix& beams, const SymbolVector& symbols,
                                   const WaveformParams& params, double theta_th,
                                   const SmoothingParams& smoothing, const PGDConfig& cfg);

// Waveguides are independent and processed with OpenMP.
PlacementMatrix optimize_all_positions(const SystemGeometry& geom, const PlacementMatrix& current,
                                       const BeamMatrix& beams, const SymbolVector& symbols,
                                       const WaveformParams& params, double theta_th,
                                       const SmoothingParams& smoothing, const PGDConfig& cfg);

// Single-threaded reference; must produce identical output.
PlacementMatrix optimize_all_positions_serial(const SystemGeometry& geom,
                                              const PlacementMatrix& current,
                                              const BeamMatrix& beams, const SymbolVector& symbols,
                                              const WaveformParams& params, double theta_th,
                                              const SmoothingParams& smoothing,
                                              const PGDConfig& cfg);

// lambda_k from the expanded triple sum (eta / sqrt(L)) sum_{m,n,l} |w_mn| / q e^{j(f + beta_ang)}.
cdouble lambda_triple_sum(const SystemGeometry& geom, const PlacementMatrix& placement,
                          const WaveformParams& params, const BeamMatrix& beams,
                          const SymbolVector& symbols, int k);

// sum_k ( eta/sqrt(L) (|G_im,k| - t G_re,k) + sqrt(gamma_k sigma^2) t ).
double placement_objective_exact(const SystemGeometry& geom, const PlacementMatrix& placement,
                                 const WaveformParams& params, const BeamMatrix& beams,
                                 const SymbolVector& symbols, std::span<const double> gamma,
                                 double noise_power, double theta_th);

}  // namespace pinslp
