// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pinslp Authors
//
// Wall-clock comparison of the OpenMP kernels against their serial references.

#include <chrono>
#include <cstdio>
#include <random>

#include <omp.h>

#include "CLI11.hpp"
#include "pinslp/experiment.hpp"

namespace {

template <typename F>
double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    best = std::min(best, dt.count());
  }
  return best;
}

void report(const char* name, double serial, double parallel) {
  std::printf("%-24s serial %9.4f s  parallel %9.4f s  speedup %5.2fx\n", name, serial, parallel,
              serial / parallel);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Serial vs. parallel timing"};
  int trials = 8;
  int reps = 3;
  int pas = 5;
  int threads = 0;
  app.add_option("--trials", trials, "Monte Carlo trials per run")->check(CLI::PositiveNumber);
  app.add_option("--reps", reps, "Repetitions; the fastest is reported")->check(CLI::PositiveNumber);
  app.add_option("--pas", pas, "PAs per waveguide")->check(CLI::PositiveNumber);
  app.add_option("--threads", threads, "OpenMP threads (0 keeps the default)");
  CLI11_PARSE(app, argc, argv);
  if (threads > 0) omp_set_num_threads(threads);
  std::printf("threads: %d\n", omp_get_max_threads());

  pinslp::ExperimentConfig cfg;
  cfg.trials = trials;
  cfg.num_pas = std::vector<int>{pas};
  cfg.gamma_db = std::vector<double>{16.0};
  cfg.schemes = {pinslp::Scheme::kProposed};
  cfg.threads = threads;

  std::size_t sink = 0;
  const double ts = best_of(reps, [&] {
    sink += pinslp::run_power_vs_sinr(cfg, pinslp::ExecutionMode::kSerial).size();
  });
  const double tp = best_of(reps, [&] {
    sink += pinslp::run_power_vs_sinr(cfg, pinslp::ExecutionMode::kParallel).size();
  });
  report("trials", ts, tp);

  // One placement update on a larger array.
  pinslp::ExperimentConfig big = cfg;
  big.num_waveguides = 16;
  big.num_users = 8;
  pinslp::Scenario sc = pinslp::generate_scenario(big, 0);
  sc.geom.pas_per_waveguide = pas;
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd(0.0, 1e-2);
  pinslp::BeamMatrix w{Eigen::MatrixXcd(big.num_waveguides, big.num_users)};
  for (Eigen::Index i = 0; i < w.w.size(); ++i) w.w(i) = {nd(rng), nd(rng)};
  const pinslp::PlacementMatrix x0 = pinslp::fixed_uniform_placement(sc.geom);
  const auto params = big.waveform();
  const double ps = best_of(reps, [&] {
    sink += pinslp::optimize_all_positions_serial(sc.geom, x0, w, sc.symbols, params,
                                                  big.theta_th(), {}, {})
                .coords.size();
  });
  const double pp = best_of(reps, [&] {
    sink += pinslp::optimize_all_positions(sc.geom, x0, w, sc.symbols, params, big.theta_th(), {},
                                           {})
                .coords.size();
  });
  report("optimize_all_positions", ps, pp);
  return sink == 0 ? 1 : 0;
}
