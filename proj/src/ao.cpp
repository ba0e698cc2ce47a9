// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pinslp Authors

#include "pinslp/ao.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace pinslp {

QPSolution solve_at_placement(const SystemGeometry& geom, const WaveformParams& params,
                              const SymbolVector& symbols, const LinkBudget& link,
                              const PlacementMatrix& placement, const QPSolverOptions& options) {
  const ChannelSnapshot snap = effective_channels(geom, placement, params);
  const QPInstance qp = build_ci_qp(snap, symbols, link.gamma, link.noise_power, link.theta_th);
  return solve_min_power(qp, options);
}

AOResult ao_solve(const SystemGeometry& geom, const WaveformParams& params,
                  const SymbolVector& symbols, const LinkBudget& link,
                  const PlacementMatrix& initial, const SolverSettings& settings) {
  AOResult res;
  res.placement = initial;
  res.precoder = solve_at_placement(geom, params, symbols, link, initial, settings.qp);
  if (!res.precoder.feasible)
    throw std::runtime_error("ao_solve: precoder infeasible at the initial placement");
  res.beams = recover_beam_matrix(res.precoder.x_opt, symbols);
  res.trace.initial_power = res.precoder.power;
  if (!settings.ao.optimize_placement) {
    res.converged = true;
    return res;
  }

  const auto& cfg = settings.ao;
  for (int it = 1; it <= cfg.max_iters; ++it) {
    const PlacementMatrix candidate =
        settings.parallel_placement
            ? optimize_all_positions(geom, res.placement, res.beams, symbols, params,
                                     link.theta_th, settings.smoothing, settings.pgd)
            : optimize_all_positions_serial(geom, res.placement, res.beams, symbols, params,
                                            link.theta_th, settings.smoothing, settings.pgd);
    QPSolution cand = solve_at_placement(geom, params, symbols, link, candidate, settings.qp);

    AOIterate step;
    step.iteration = it;
    step.candidate_power =
        cand.feasible ? cand.power : std::numeric_limits<double>::infinity();
    step.placement_objective = placement_objective_exact(
        geom, candidate, params, res.beams, symbols, link.gamma, link.noise_power, link.theta_th);

    const double current = res.precoder.power;
    step.accepted = cand.feasible && (!cfg.guard_enabled || cand.power <= current);
    if (step.accepted) {
      step.rel_change = std::abs(current - cand.power) / current;
      res.placement = candidate;
      res.precoder = std::move(cand);
      res.beams = recover_beam_matrix(res.precoder.x_opt, symbols);
    }
    step.power = res.precoder.power;
    res.trace.iterations.push_back(step);
    if (step.rel_change <= cfg.rel_tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

PlacementMatrix fixed_uniform_placement(const SystemGeometry& geom) {
  const int L = geom.pas_per_waveguide;
  PlacementMatrix x(geom.num_waveguides(), L);
  for (int n = 0; n < geom.num_waveguides(); ++n)
    for (int l = 0; l < L; ++l) x(n, l) = (l + 0.5) * geom.waveguide_length / L;
  return x;
}

PlacementMatrix random_placement(const SystemGeometry& geom, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::vector<MovableRegion> regions = initial_regions(geom);
  PlacementMatrix x(geom.num_waveguides(), geom.pas_per_waveguide);
  for (int n = 0; n < geom.num_waveguides(); ++n) {
    for (int l = 0; l < geom.pas_per_waveguide; ++l) {
      std::uniform_real_distribution<double> draw(regions[l].lower, regions[l].upper);
      x(n, l) = draw(rng);
    }
  }
  return x;
}

ChannelSnapshot conventional_array_snapshot(const SystemGeometry& geom, const WaveformParams& params) {
  const int N = geom.num_waveguides();
  const int K = geom.num_users();
  std::vector<Vec3> antennas(N);
  for (int i = 0; i < N; ++i)
    antennas[i] = {i * params.wavelength / 2.0, geom.region_side / 2.0, geom.height};

  ChannelSnapshot snap;
  snap.effective.resize(K, N);
  snap.raw.assign(K, Eigen::MatrixXcd(N, 1));
  snap.distance.assign(K, Eigen::MatrixXd(N, 1));
  for (int k = 0; k < K; ++k) {
    const Eigen::VectorXcd h = freespace_channel(geom.users[k], antennas, params);
    for (int i = 0; i < N; ++i) {
      snap.effective(k, i) = h(i);
      snap.raw[k](i, 0) = h(i);
      snap.distance[k](i, 0) = user_pa_distance(geom.users[k], antennas[i]);
    }
  }
  return snap;
}

double min_ci_margin(const Eigen::MatrixXcd& effective, const SymbolVector& symbols,
                     const BeamMatrix& beams, const LinkBudget& link) {
  const Eigen::VectorXcd x = beams.w * symbols.s;
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < symbols.size(); ++k) {
    const cdouble lambda = (effective.row(k) * x)(0) / symbols[k];
    worst = std::min(worst, ci_margin(lambda, link.gamma[k], link.noise_power, link.theta_th));
  }
  return worst;
}

}  // namespace pinslp
