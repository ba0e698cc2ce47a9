// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pinslp Authors

#include "pinslp/placement.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pinslp {

SubproblemTerms make_subproblem_terms(const SystemGeometry& geom, int n, const BeamMatrix& beams,
                                      const SymbolVector& symbols, const WaveformParams& params,
                                      double theta_th) {
  const int K = geom.num_users();
  if (beams.num_users() != K || symbols.size() != K)
    throw std::invalid_argument("make_subproblem_terms: user count mismatch");
  if (n < 0 || n >= geom.num_waveguides())
    throw std::out_of_range("make_subproblem_terms: waveguide index");

  SubproblemTerms t;
  t.num_users = K;
  t.waveguide_y = geom.waveguide_y[n];
  t.height = geom.height;
  t.beta0 = params.beta0;
  t.beta1 = params.beta1;
  t.tan_theta = std::tan(theta_th);
  t.terms.resize(static_cast<std::size_t>(K) * K);
  for (int m = 0; m < K; ++m) {
    const cdouble w = beams.w(n, m);
    for (int k = 0; k < K; ++k) {
      auto& term = t.terms[static_cast<std::size_t>(m * K + k)];
      term.amplitude = std::abs(w);
      term.phase_offset = std::arg(w) + std::arg(symbols[m]) - std::arg(symbols[k]);
      term.user_x = geom.users[k].x;
      term.user_y = geom.users[k].y;
    }
  }
  return t;
}

namespace {

struct TermEval {
  double q = 0.0;
  GTerms g;
};

TermEval evaluate(const SubproblemTerms& t, const SubproblemTerms::Term& term, double x) {
  const double dx = term.user_x - x;
  const double dy = term.user_y - t.waveguide_y;
  const double q = std::sqrt(dx * dx + dy * dy + t.height * t.height);
  const double phase = -t.beta0 * q - t.beta1 * x + term.phase_offset;
  const double r = term.amplitude / q;
  return {q, {r * std::sin(phase), r * std::cos(phase)}};
}

// Weight of the first argument in d/dx smooth_max(a, b, eps).
double softmax_weight(double a, double b, double eps) {
  if (a >= b) return 1.0 / (1.0 + std::exp(-(a - b) / eps));
  const double e = std::exp(-(b - a) / eps);
  return e / (1.0 + e);
}

PhiBranches derivatives(const SubproblemTerms& t, const SubproblemTerms::Term& term, double x,
                        const TermEval& ev) {
  const double tt = t.tan_theta;
  const double u = (x - term.user_x) / (ev.q * ev.q);
  const double bq = t.beta0 * ev.q;
  PhiBranches d;
  d.bar = ev.g.re * (u * (-bq + tt) - t.beta1) - ev.g.im * (u * (bq * tt + 1.0) + t.beta1 * tt);
  d.hat = ev.g.re * (u * (bq + tt) + t.beta1) - ev.g.im * (u * (bq * tt - 1.0) + t.beta1 * tt);
  return d;
}

}  // namespace

GTerms g_terms(const SubproblemTerms& terms, double x, int m, int k) {
  return evaluate(terms, terms.term(m, k), x).g;
}

PhiBranches phi_branches(const SubproblemTerms& terms, double x, int m, int k) {
  const GTerms g = g_terms(terms, x, m, k);
  return {g.im - g.re * terms.tan_theta, -g.im - g.re * terms.tan_theta};
}

PhiBranches phi_branch_derivatives(const SubproblemTerms& terms, double x, int m, int k) {
  const auto& term = terms.term(m, k);
  return derivatives(terms, term, x, evaluate(terms, term, x));
}

double smooth_max(double a, double b, double eps) {
  return std::max(a, b) + eps * std::log1p(std::exp(-std::abs(a - b) / eps));
}

double smooth_term(const SubproblemTerms& terms, double x, int m, int k, double eps) {
  const PhiBranches p = phi_branches(terms, x, m, k);
  return smooth_max(p.bar, p.hat, eps);
}

double subproblem_objective(const SubproblemTerms& terms, double x, double eps) {
  double sum = 0.0;
  for (const auto& term : terms.terms) {
    const GTerms g = evaluate(terms, term, x).g;
    sum += smooth_max(g.im - g.re * terms.tan_theta, -g.im - g.re * terms.tan_theta, eps);
  }
  return sum;
}

double subproblem_gradient(const SubproblemTerms& terms, double x, double eps) {
  double grad = 0.0;
  for (const auto& term : terms.terms) {
    const TermEval ev = evaluate(terms, term, x);
    const double bar = ev.g.im - ev.g.re * terms.tan_theta;
    const double hat = -ev.g.im - ev.g.re * terms.tan_theta;
    const PhiBranches d = derivatives(terms, term, x, ev);
    const double w = softmax_weight(bar, hat, eps);
    grad += w * d.bar + (1.0 - w) * d.hat;
  }
  return grad;
}

double resolve_epsilon(const SmoothingParams& smoothing, const SubproblemTerms& terms, double x) {
  if (!smoothing.adaptive) return std::max(smoothing.epsilon, smoothing.floor);
  double peak = 0.0;
  for (const auto& term : terms.terms) {
    const GTerms g = evaluate(terms, term, x).g;
    peak = std::max({peak, std::abs(g.im - g.re * terms.tan_theta),
                     std::abs(-g.im - g.re * terms.tan_theta)});
  }
  return std::max(smoothing.kappa * peak, smoothing.floor);
}

double project(double x, const MovableRegion& region) {
  return std::clamp(x, region.lower, region.upper);
}

namespace {

struct LineSearch {
  double step = 0.0;
  double trial = 0.0;
  double value = 0.0;
};

LineSearch backtrack(const std::function<double(double)>& objective, double fx, double gradient,
                     double x, const PGDConfig& cfg, const std::optional<MovableRegion>& region) {
  double mu = cfg.init_step;
  for (int i = 0; i <= cfg.max_backtracks; ++i) {
    const double raw = x - mu * gradient;
    const double trial = region ? project(raw, *region) : raw;
    const double decrease =
        region ? cfg.armijo_c1 * gradient * (x - trial) : cfg.armijo_c1 * mu * gradient * gradient;
    const double ft = objective(trial);
    if (ft <= fx - decrease) return {mu, trial, ft};
    mu *= cfg.shrink;
  }
  return {0.0, x, fx};
}

PGDResult pgd_single(const SubproblemTerms& terms, const MovableRegion& region, double eps,
                     const PGDConfig& cfg, double x_init) {
  const auto f = [&](double x) { return subproblem_objective(terms, x, eps); };
  PGDResult res;
  res.x = project(x_init, region);
  res.objective = f(res.x);
  res.history.push_back(res.objective);
  for (int it = 1; it <= cfg.max_iters; ++it) {
    res.iterations = it;
    const double g = subproblem_gradient(terms, res.x, eps);
    const LineSearch ls = backtrack(f, res.objective, g, res.x, cfg, region);
    if (ls.step == 0.0) break;
    const double dx = std::abs(ls.trial - res.x);
    res.x = ls.trial;
    res.objective = ls.value;
    res.history.push_back(res.objective);
    if (dx <= cfg.step_tol) break;
  }
  return res;
}

}  // namespace

double armijo_step(const std::function<double(double)>& objective, double gradient, double x,
                   const PGDConfig& cfg, const std::optional<MovableRegion>& region) {
  return backtrack(objective, objective(x), gradient, x, cfg, region).step;
}

PGDResult pgd_solve(const SubproblemTerms& terms, const MovableRegion& region, double eps,
                    const PGDConfig& cfg, double x_init) {
  PGDResult best = pgd_single(terms, region, eps, cfg, x_init);
  for (int r = 0; r < cfg.restarts; ++r) {
    const double start = region.lower + (r + 0.5) * region.width() / cfg.restarts;
    PGDResult cand = pgd_single(terms, region, eps, cfg, start);
    if (cand.objective < best.objective) best = std::move(cand);
  }
  return best;
}

Eigen::VectorXd optimize_waveguide(const SystemGeometry& geom, int n, const Eigen::VectorXd& current,
                                   const BeamMatrix& beams, const SymbolVector& symbols,
                                   const WaveformParams& params, double theta_th,
                                   const SmoothingParams& smoothing, const PGDConfig& cfg) {
  const SubproblemTerms terms = make_subproblem_terms(geom, n, beams, symbols, params, theta_th);
  const std::vector<MovableRegion> init = initial_regions(geom);
  const int L = geom.pas_per_waveguide;
  Eigen::VectorXd out(L);
  for (int l = 0; l < L; ++l) {
    const std::optional<double> prev = l > 0 ? std::optional<double>(out(l - 1)) : std::nullopt;
    const MovableRegion region =
        updated_region(l, prev, init[l], geom.min_spacing, geom.waveguide_length);
    const double x0 = project(current(l), region);
    const double eps = resolve_epsilon(smoothing, terms, x0);
    out(l) = pgd_solve(terms, region, eps, cfg, x0).x;
  }
  return out;
}

PlacementMatrix optimize_all_positions(const SystemGeometry& geom, const PlacementMatrix& current,
                                       const BeamMatrix& beams, const SymbolVector& symbols,
                                       const WaveformParams& params, double theta_th,
                                       const SmoothingParams& smoothing, const PGDConfig& cfg) {
  const int N = geom.num_waveguides();
  PlacementMatrix out(N, geom.pas_per_waveguide);
#pragma omp parallel for schedule(dynamic)
  for (int n = 0; n < N; ++n) {
    out.coords.row(n) = optimize_waveguide(geom, n, current.coords.row(n).transpose(), beams,
                                           symbols, params, theta_th, smoothing, cfg)
                            .transpose();
  }
  return out;
}

PlacementMatrix optimize_all_positions_serial(const SystemGeometry& geom,
                                              const PlacementMatrix& current,
                                              const BeamMatrix& beams, const SymbolVector& symbols,
                                              const WaveformParams& params, double theta_th,
                                              const SmoothingParams& smoothing,
                                              const PGDConfig& cfg) {
  const int N = geom.num_waveguides();
  PlacementMatrix out(N, geom.pas_per_waveguide);
  for (int n = 0; n < N; ++n) {
    out.coords.row(n) = optimize_waveguide(geom, n, current.coords.row(n).transpose(), beams,
                                           symbols, params, theta_th, smoothing, cfg)
                            .transpose();
  }
  return out;
}

cdouble lambda_triple_sum(const SystemGeometry& geom, const PlacementMatrix& placement,
                          const WaveformParams& params, const BeamMatrix& beams,
                          const SymbolVector& symbols, int k) {
  const int K = geom.num_users();
  const int N = geom.num_waveguides();
  const int L = geom.pas_per_waveguide;
  const Vec3& u = geom.users[k];
  cdouble acc = 0.0;
  for (int m = 0; m < K; ++m) {
    for (int n = 0; n < N; ++n) {
      const cdouble w = beams.w(n, m);
      const double ang = std::arg(w) + std::arg(symbols[m]) - std::arg(symbols[k]);
      for (int l = 0; l < L; ++l) {
        const double x = placement(n, l);
        const double q = std::sqrt((u.x - x) * (u.x - x) +
                                   (u.y - geom.waveguide_y[n]) * (u.y - geom.waveguide_y[n]) +
                                   geom.height * geom.height);
        const double f = -params.beta0 * q - params.beta1 * x;
        acc += std::polar(std::abs(w) / q, f + ang);
      }
    }
  }
  return params.eta / std::sqrt(static_cast<double>(L)) * acc;
}

double placement_objective_exact(const SystemGeometry& geom, const PlacementMatrix& placement,
                                 const WaveformParams& params, const BeamMatrix& beams,
                                 const SymbolVector& symbols, std::span<const double> gamma,
                                 double noise_power, double theta_th) {
  const double t = std::tan(theta_th);
  double total = 0.0;
  for (int k = 0; k < geom.num_users(); ++k) {
    const cdouble lam = lambda_triple_sum(geom, placement, params, beams, symbols, k);
    total += std::abs(lam.imag()) - t * lam.real() + std::sqrt(gamma[k] * noise_power) * t;
  }
  return total;
}

}  // namespace pinslp
