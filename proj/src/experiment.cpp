// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pinslp Authors

#include "pinslp/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <omp.h>

#include "json.hpp"

namespace pinslp {

namespace {

constexpr std::string_view kSchemeNames[] = {"proposed", "fixed", "random", "conventional"};
constexpr std::string_view kExperimentNames[] = {"power-vs-sinr", "power-vs-numpas",
                                                 "convergence"};

}  // namespace

std::string_view scheme_name(Scheme s) { return kSchemeNames[static_cast<int>(s)]; }

Scheme parse_scheme(std::string_view name) {
  for (int i = 0; i < 4; ++i)
    if (kSchemeNames[i] == name) return static_cast<Scheme>(i);
  throw std::invalid_argument("unknown scheme '" + std::string(name) + "'");
}

std::string_view experiment_name(ExperimentKind k) { return kExperimentNames[static_cast<int>(k)]; }

ExperimentKind parse_experiment(std::string_view name) {
  for (int i = 0; i < 3; ++i)
    if (kExperimentNames[i] == name) return static_cast<ExperimentKind>(i);
  throw std::invalid_argument("unknown experiment '" + std::string(name) + "'");
}

double ExperimentConfig::spacing() const {
  return min_spacing ? *min_spacing : waveform().wavelength / 2.0;
}

double ExperimentConfig::theta_th() const { return std::numbers::pi / modulation_order; }

std::vector<int> ExperimentConfig::resolved_num_pas(ExperimentKind kind) const {
  if (num_pas) {
    if (kind == ExperimentKind::kPowerVsSinr && num_pas->size() != 1)
      throw std::invalid_argument("power-vs-sinr needs a single num_pas value");
    return *num_pas;
  }
  switch (kind) {
    case ExperimentKind::kPowerVsSinr: return {5};
    case ExperimentKind::kPowerVsNumPas: return {1, 2, 3, 4, 5, 6, 7};
    case ExperimentKind::kConvergence: return {3, 5, 7};
  }
  return {};
}

std::vector<double> ExperimentConfig::resolved_gamma_db(ExperimentKind kind) const {
  if (gamma_db) {
    if (kind != ExperimentKind::kPowerVsSinr && gamma_db->size() != 1)
      throw std::invalid_argument(std::string(experiment_name(kind)) +
                                  " needs a single gamma_db value");
    return *gamma_db;
  }
  switch (kind) {
    case ExperimentKind::kPowerVsSinr: return {10, 12, 14, 16, 18, 20};
    case ExperimentKind::kPowerVsNumPas: return {20};
    case ExperimentKind::kConvergence: return {16};
  }
  return {};
}

void ExperimentConfig::validate() const {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument(std::string("config: ") + what + " must be positive");
  };
  positive(carrier_freq, "carrier_freq_hz");
  positive(n_eff, "n_eff");
  positive(region_side, "region_side_m");
  positive(height, "height_m");
  positive(waveguide_length, "waveguide_length_m");
  if (!std::isfinite(noise_dbm)) throw std::invalid_argument("config: noise_dbm must be finite");
  if (min_spacing && !(*min_spacing >= 0.0))
    throw std::invalid_argument("config: min_spacing_m must be nonnegative");
  if (num_waveguides < 1 || num_users < 1) throw std::invalid_argument("config: N and K must be >= 1");
  if (modulation_order < 2) throw std::invalid_argument("config: modulation_order must be >= 2");
  if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (schemes.empty()) throw std::invalid_argument("config: schemes must be nonempty");
  if (num_pas) {
    if (num_pas->empty()) throw std::invalid_argument("config: num_pas sweep is empty");
    for (int l : *num_pas)
      if (l < 1) throw std::invalid_argument("config: num_pas entries must be >= 1");
  }
  if (gamma_db) {
    if (gamma_db->empty()) throw std::invalid_argument("config: gamma_db sweep is empty");
    for (double g : *gamma_db)
      if (!std::isfinite(g)) throw std::invalid_argument("config: gamma_db entries must be finite");
  }
  if (!(solver.ao.rel_tol > 0.0)) throw std::invalid_argument("config: ao.rel_tol must be positive");
  if (solver.ao.max_iters < 1) throw std::invalid_argument("config: ao.max_iters must be >= 1");
  const auto& p = solver.pgd;
  if (p.max_iters < 1 || !(p.step_tol > 0.0) || !(p.init_step > 0.0) || !(p.armijo_c1 > 0.0) ||
      !(p.shrink > 0.0 && p.shrink < 1.0) || p.max_backtracks < 1 || p.restarts < 0)
    throw std::invalid_argument("config: invalid pgd settings");
  const auto& s = solver.smoothing;
  if (!(s.floor > 0.0) || !(s.kappa > 0.0) || !(s.epsilon > 0.0))
    throw std::invalid_argument("config: smoothing parameters must be positive");
  if (!(solver.qp.tol > 0.0) || solver.qp.max_sweeps < 1)
    throw std::invalid_argument("config: invalid qp settings");
}

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed,
                    const std::string& where) {
  if (!obj.is_object()) throw std::invalid_argument("config: " + where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw std::invalid_argument("config: unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

template <typename T>
std::vector<T> scalar_or_list(const json& v) {
  if (v.is_array()) return v.get<std::vector<T>>();
  return {v.get<T>()};
}

}  // namespace

ExperimentConfig parse_config(std::string_view json_text) {
  ExperimentConfig cfg;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: malformed JSON: ") + e.what());
  }
  try {
    reject_unknown(doc,
                   {"carrier_freq_hz", "n_eff", "noise_dbm", "region_side_m", "height_m",
                    "num_waveguides", "num_users", "modulation_order", "num_pas", "gamma_db",
                    "waveguide_length_m", "min_spacing_m", "trials", "master_seed", "schemes",
                    "threads", "smoothing", "pgd", "ao", "qp"},
                   "top level");
    read(doc, "carrier_freq_hz", cfg.carrier_freq);
    read(doc, "n_eff", cfg.n_eff);
    read(doc, "noise_dbm", cfg.noise_dbm);
    read(doc, "region_side_m", cfg.region_side);
    read(doc, "height_m", cfg.height);
    read(doc, "num_waveguides", cfg.num_waveguides);
    read(doc, "num_users", cfg.num_users);
    read(doc, "modulation_order", cfg.modulation_order);
    read(doc, "waveguide_length_m", cfg.waveguide_length);
    read(doc, "trials", cfg.trials);
    read(doc, "master_seed", cfg.master_seed);
    read(doc, "threads", cfg.threads);
    if (doc.contains("num_pas")) cfg.num_pas = scalar_or_list<int>(doc.at("num_pas"));
    if (doc.contains("gamma_db")) cfg.gamma_db = scalar_or_list<double>(doc.at("gamma_db"));
    if (doc.contains("min_spacing_m") && !doc.at("min_spacing_m").is_null())
      cfg.min_spacing = doc.at("min_spacing_m").get<double>();
    if (doc.contains("schemes")) {
      cfg.schemes.clear();
      for (const auto& s : doc.at("schemes")) cfg.schemes.push_back(parse_scheme(s.get<std::string>()));
    }
    if (doc.contains("smoothing")) {
      const json& s = doc.at("smoothing");
      reject_unknown(s, {"adaptive", "epsilon", "kappa", "floor"}, "smoothing");
      read(s, "adaptive", cfg.solver.smoothing.adaptive);
      read(s, "epsilon", cfg.solver.smoothing.epsilon);
      read(s, "kappa", cfg.solver.smoothing.kappa);
      read(s, "floor", cfg.solver.smoothing.floor);
    }
    if (doc.contains("pgd")) {
      const json& p = doc.at("pgd");
      reject_unknown(p,
                     {"max_iters", "step_tol", "init_step", "armijo_c1", "shrink",
                      "max_backtracks", "restarts"},
                     "pgd");
      read(p, "max_iters", cfg.solver.pgd.max_iters);
      read(p, "step_tol", cfg.solver.pgd.step_tol);
      read(p, "init_step", cfg.solver.pgd.init_step);
      read(p, "armijo_c1", cfg.solver.pgd.armijo_c1);
      read(p, "shrink", cfg.solver.pgd.shrink);
      read(p, "max_backtracks", cfg.solver.pgd.max_backtracks);
      read(p, "restarts", cfg.solver.pgd.restarts);
    }
    if (doc.contains("ao")) {
      const json& a = doc.at("ao");
      reject_unknown(a, {"max_iters", "rel_tol", "guard_enabled"}, "ao");
      read(a, "max_iters", cfg.solver.ao.max_iters);
      read(a, "rel_tol", cfg.solver.ao.rel_tol);
      read(a, "guard_enabled", cfg.solver.ao.guard_enabled);
    }
    if (doc.contains("qp")) {
      const json& q = doc.at("qp");
      reject_unknown(q, {"tol", "max_sweeps"}, "qp");
      read(q, "tol", cfg.solver.qp.tol);
      read(q, "max_sweeps", cfg.solver.qp.max_sweeps);
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::uint64_t trial_seed(std::uint64_t master_seed, int trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                    static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(trial)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

Scenario generate_scenario(const ExperimentConfig& cfg, int trial) {
  Scenario sc;
  sc.seed = trial_seed(cfg.master_seed, trial);
  std::mt19937_64 rng(sc.seed);
  std::uniform_real_distribution<double> coord(0.0, cfg.region_side);

  sc.geom.region_side = cfg.region_side;
  sc.geom.height = cfg.height;
  sc.geom.waveguide_y = uniform_waveguide_y(cfg.num_waveguides, cfg.region_side);
  sc.geom.waveguide_length = cfg.waveguide_length;
  sc.geom.min_spacing = cfg.spacing();
  sc.geom.pas_per_waveguide = 1;
  sc.geom.users.resize(cfg.num_users);
  for (auto& u : sc.geom.users) {
    u.x = coord(rng);
    u.y = coord(rng);
    u.z = 0.0;
  }
  sc.symbols = draw_psk_symbols(cfg.num_users, cfg.modulation_order, rng);
  return sc;
}

namespace {

std::uint64_t random_placement_seed(std::uint64_t seed, int num_pas) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(num_pas), 0x52414e44u};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

LinkBudget make_link(const ExperimentConfig& cfg, double gamma_db) {
  LinkBudget link;
  link.gamma.assign(cfg.num_users, db_to_linear(gamma_db));
  link.noise_power = cfg.noise_power();
  link.theta_th = cfg.theta_th();
  return link;
}

void set_power(ExperimentRecord& rec, double power_w) {
  rec.power_w = power_w;
  rec.power_dbm = watts_to_dbm(power_w);
}

void mark_infeasible(ExperimentRecord& rec) {
  rec.feasible = false;
  rec.converged = false;
  rec.power_w = std::numeric_limits<double>::quiet_NaN();
  rec.power_dbm = std::numeric_limits<double>::quiet_NaN();
}

ExperimentRecord evaluate_scheme(const ExperimentConfig& cfg, const Scenario& sc,
                                 const SystemGeometry& geom, Scheme scheme, double gamma_db,
                                 std::string_view experiment, int trial) {
  ExperimentRecord rec;
  rec.experiment = std::string(experiment);
  rec.trial = trial;
  rec.seed = sc.seed;
  rec.scheme = scheme;
  rec.gamma_db = gamma_db;
  rec.num_pas = geom.pas_per_waveguide;

  const WaveformParams params = cfg.waveform();
  const LinkBudget link = make_link(cfg, gamma_db);
  // Single-threaded inside a trial; trials are the parallel unit.
  SolverSettings settings = cfg.solver;
  settings.parallel_placement = false;

  try {
    if (scheme == Scheme::kConventional) {
      const ChannelSnapshot snap = conventional_array_snapshot(geom, params);
      const QPInstance qp = build_ci_qp(snap, sc.symbols, link.gamma, link.noise_power, link.theta_th);
      const QPSolution sol = solve_min_power(qp, settings.qp);
      if (!sol.feasible) {
        mark_infeasible(rec);
        return rec;
      }
      const BeamMatrix w = recover_beam_matrix(sol.x_opt, sc.symbols);
      set_power(rec, sol.power);
      rec.feasible = rec.converged = true;
      rec.min_margin = min_ci_margin(snap.effective, sc.symbols, w, link);
      return rec;
    }

    PlacementMatrix placement;
    QPSolution sol;
    if (scheme == Scheme::kProposed) {
      const AOResult ao =
          ao_solve(geom, params, sc.symbols, link, fixed_uniform_placement(geom), settings);
      placement = ao.placement;
      sol = ao.precoder;
      rec.ao_iters = static_cast<int>(ao.trace.iterations.size());
      rec.converged = ao.converged;
    } else {
      placement = scheme == Scheme::kFixed
                      ? fixed_uniform_placement(geom)
                      : random_placement(geom, random_placement_seed(sc.seed, geom.pas_per_waveguide));
      sol = solve_at_placement(geom, params, sc.symbols, link, placement, settings.qp);
      rec.converged = sol.feasible;
    }
    if (!sol.feasible) {
      mark_infeasible(rec);
      return rec;
    }
    rec.feasible = true;
    set_power(rec, sol.power);
    const BeamMatrix w = recover_beam_matrix(sol.x_opt, sc.symbols);
    rec.min_margin = min_ci_margin(effective_channels(geom, placement, params).effective, sc.symbols, w, link);
    rec.placement_valid = validate_placement(geom, placement).ok();
  } catch (const std::runtime_error&) {
    mark_infeasible(rec);
  }
  return rec;
}

std::vector<ExperimentRecord> run_trial(const ExperimentConfig& cfg, ExperimentKind kind, int trial) {
  const Scenario sc = generate_scenario(cfg, trial);
  const std::vector<int> pas = cfg.resolved_num_pas(kind);
  const std::vector<double> gammas = cfg.resolved_gamma_db(kind);
  const std::string_view name = experiment_name(kind);

  std::set<Scheme> enabled(cfg.schemes.begin(), cfg.schemes.end());
  std::vector<ExperimentRecord> out;
  for (int L : pas) {
    SystemGeometry geom = sc.geom;
    geom.pas_per_waveguide = L;
    for (double g : gammas) {
      if (kind == ExperimentKind::kConvergence) {
        const WaveformParams params = cfg.waveform();
        const LinkBudget link = make_link(cfg, g);
        SolverSettings settings = cfg.solver;
        settings.parallel_placement = false;
        ExperimentRecord base;
        base.experiment = std::string(name);
        base.trial = trial;
        base.seed = sc.seed;
        base.scheme = Scheme::kProposed;
        base.gamma_db = g;
        base.num_pas = L;
        try {
          const AOResult ao =
              ao_solve(geom, params, sc.symbols, link, fixed_uniform_placement(geom), settings);
          const BeamMatrix w = recover_beam_matrix(ao.precoder.x_opt, sc.symbols);
          base.feasible = true;
          base.converged = ao.converged;
          base.min_margin =
              min_ci_margin(effective_channels(geom, ao.placement, params).effective, sc.symbols, w, link);
          base.placement_valid = validate_placement(geom, ao.placement).ok();
          ExperimentRecord r0 = base;
          set_power(r0, ao.trace.initial_power);
          r0.ao_iters = 0;
          out.push_back(r0);
          for (const auto& it : ao.trace.iterations) {
            ExperimentRecord r = base;
            set_power(r, it.power);
            r.ao_iters = it.iteration;
            out.push_back(r);
          }
        } catch (const std::runtime_error&) {
          mark_infeasible(base);
          out.push_back(base);
        }
        continue;
      }
      for (Scheme s : enabled) out.push_back(evaluate_scheme(cfg, sc, geom, s, g, name, trial));
    }
  }
  return out;
}

}  // namespace

std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& cfg, ExperimentKind kind,
                                             ExecutionMode mode) {
  cfg.validate();
  const int trials = cfg.trials;
  std::vector<std::vector<ExperimentRecord>> per_trial(trials);
  std::vector<std::string> errors(trials);

  auto body = [&](int t) {
    try {
      per_trial[t] = run_trial(cfg, kind, t);
    } catch (const std::exception& e) {
      errors[t] = e.what();
    }
  };

  if (mode == ExecutionMode::kParallel) {
    const int threads = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (int t = 0; t < trials; ++t) body(t);
  } else {
    for (int t = 0; t < trials; ++t) body(t);
  }

  for (int t = 0; t < trials; ++t)
    if (!errors[t].empty())
      throw std::runtime_error("trial " + std::to_string(t) + ": " + errors[t]);

  std::vector<ExperimentRecord> out;
  for (auto& recs : per_trial) out.insert(out.end(), recs.begin(), recs.end());
  return out;
}

std::vector<ExperimentRecord> run_power_vs_sinr(const ExperimentConfig& cfg, ExecutionMode mode) {
  return run_experiment(cfg, ExperimentKind::kPowerVsSinr, mode);
}

std::vector<ExperimentRecord> run_power_vs_numpas(const ExperimentConfig& cfg, ExecutionMode mode) {
  return run_experiment(cfg, ExperimentKind::kPowerVsNumPas, mode);
}

std::vector<ExperimentRecord> run_convergence(const ExperimentConfig& cfg, ExecutionMode mode) {
  return run_experiment(cfg, ExperimentKind::kConvergence, mode);
}

std::vector<SummaryRow> summarize(const std::vector<ExperimentRecord>& records) {
  std::map<std::tuple<int, double, int>, SummaryRow> groups;
  for (const auto& r : records) {
    auto& row = groups[{static_cast<int>(r.scheme), r.gamma_db, r.num_pas}];
    row.scheme = r.scheme;
    row.gamma_db = r.gamma_db;
    row.num_pas = r.num_pas;
    ++row.trials;
    if (r.feasible && std::isfinite(r.power_w)) {
      ++row.feasible;
      row.mean_power_w += r.power_w;
    }
  }
  std::vector<SummaryRow> out;
  for (auto& [_, row] : groups) {
    row.mean_power_w = row.feasible ? row.mean_power_w / row.feasible
                                    : std::numeric_limits<double>::quiet_NaN();
    out.push_back(row);
  }
  return out;
}

}  // namespace pinslp
