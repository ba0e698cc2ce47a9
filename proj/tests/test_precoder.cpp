// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pinslp Authors

#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "pinslp/ao.hpp"
#include "pinslp/oracles.hpp"
#include "pinslp/precoder.hpp"
#include "test_support.hpp"

using namespace pinslp;
using pinslp::testing::params28;

namespace {

struct Instance {
  SystemGeometry geom;
  ChannelSnapshot snap;
  SymbolVector symbols;
  LinkBudget link;
};

Instance random_instance(std::mt19937_64& rng, int N, int K, int L = 3, double gamma_db = 20.0) {
  Instance in;
  in.geom = testing::random_geometry(rng, N, L, K);
  in.snap = effective_channels(in.geom, testing::random_valid_placement(rng, in.geom), params28());
  in.symbols = draw_psk_symbols(K, 4, rng);
  in.link = testing::link_for(K, gamma_db);
  return in;
}

QPInstance qp_of(const Instance& in) {
  return build_ci_qp(in.snap, in.symbols, in.link.gamma, in.link.noise_power, in.link.theta_th);
}

// Problem over the full beam matrix: unknowns vec(W), constraint rows built
// from lambda_k = sum_m h_k w_m s_m / s_k.
QPInstance full_w_qp(const Instance& in) {
  const int K = in.symbols.size();
  const int N = in.snap.num_waveguides();
  const double t = std::tan(in.link.theta_th);
  QPInstance qp;
  qp.A.resize(2 * K, 2 * N * K);
  qp.b.resize(2 * K);
  qp.power_scale = 1.0;
  for (int k = 0; k < K; ++k) {
    Eigen::RowVectorXcd a(N * K);
    for (int m = 0; m < K; ++m)
      a.segment(m * N, N) = in.snap.effective.row(k) * in.symbols[m] / in.symbols[k];
    for (int branch : {+1, -1}) {
      const int row = 2 * k + (branch > 0 ? 0 : 1);
      qp.A.row(row).head(N * K) = t * a.real() + branch * a.imag();
      qp.A.row(row).tail(N * K) = -t * a.imag() + branch * a.real();
      qp.b(row) = t * std::sqrt(in.link.gamma[k] * in.link.noise_power);
      qp.tags.push_back({k, branch});
    }
  }
  return qp;
}

}  // namespace

TEST_CASE("build_ci_qp structure") {
  std::mt19937_64 rng(1);
  Instance in = random_instance(rng, 4, 1);
  const QPInstance qp = qp_of(in);
  CHECK(qp.num_rows() == 2);
  CHECK(qp.num_vars() == 8);
  CHECK(qp.power_scale == 1.0);

  Instance in3 = random_instance(rng, 4, 3);
  const QPInstance qp3 = qp_of(in3);
  CHECK(qp3.num_rows() == 6);
  // at x = 0 every row is violated by tan(theta) sqrt(gamma sigma^2)
  const double tau = std::sqrt(in3.link.gamma[0] * in3.link.noise_power);
  for (int i = 0; i < 6; ++i) CHECK(-qp3.b(i) == doctest::Approx(-tau * std::tan(in3.link.theta_th)));

  // rotating s_k and h_k together leaves the rows unchanged
  Instance rot = in3;
  const cdouble phase = std::polar(1.0, 1.1);
  rot.symbols.s(1) *= phase;
  rot.snap.effective.row(1) *= phase;
  const QPInstance qpr = qp_of(rot);
  CHECK((qpr.A - qp3.A).norm() <= 1e-12 * qp3.A.norm());

  // constraint rows reproduce the CI margin for random x
  const Eigen::VectorXd z = Eigen::VectorXd::Random(8) * 100.0;
  const Eigen::VectorXcd x = complex_from_stacked(z);
  const BeamMatrix w = recover_beam_matrix(x, in3.symbols);
  for (int k = 0; k < 3; ++k) {
    const double margin = ci_margin(received_lambda(in3.snap, w, in3.symbols, k), in3.link.gamma[k],
                                    in3.link.noise_power, in3.link.theta_th);
    const double rows = std::min(qp3.A.row(2 * k).dot(z) - qp3.b(2 * k),
                                 qp3.A.row(2 * k + 1).dot(z) - qp3.b(2 * k + 1));
    CHECK(rows == doctest::Approx(margin).epsilon(1e-9));
  }
}

TEST_CASE("single-user closed form") {
  const WaveformParams p = params28();
  SystemGeometry g;
  g.waveguide_y = {10.0};
  g.pas_per_waveguide = 1;
  g.min_spacing = p.wavelength / 2;
  g.users = {{7.0, 10.0, 0.0}};
  PlacementMatrix X(1, 1);
  X(0, 0) = 7.0;
  const auto snap = effective_channels(g, X, p);
  SymbolVector s{Eigen::VectorXcd::Constant(1, psk_point(2, 4)), 4};
  const LinkBudget link = testing::link_for(1, 20.0);
  const QPSolution sol = solve_min_power(build_ci_qp(snap, s, link.gamma, link.noise_power, link.theta_th));
  REQUIRE(sol.feasible);
  // gamma sigma^2 / |h|^2 with |h| = eta / 5
  CHECK(sol.power == doctest::Approx(0.0344377202).epsilon(1e-8));
  CHECK(sol.kkt_residual <= 1e-9);
  const cdouble lam = received_lambda(snap, recover_beam_matrix(sol.x_opt, s), s, 0);
  CHECK(lam.real() == doctest::Approx(std::sqrt(1e-9)).epsilon(1e-9));
  CHECK(std::abs(lam.imag()) < 1e-12 * lam.real());
}

TEST_CASE("solve_min_power agrees with active-set enumeration") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const int K = 2 + trial % 3;
    Instance in = random_instance(rng, 4, K, 1 + trial % 5, 10.0 + trial % 11);
    const QPInstance qp = qp_of(in);
    const QPSolution sol = solve_min_power(qp);
    const QPSolution ref = active_set_qp_oracle(qp);
    REQUIRE(ref.feasible);
    REQUIRE(sol.feasible);
    CHECK(sol.power == doctest::Approx(ref.power).epsilon(1e-6));
    CHECK(sol.kkt_residual <= 1e-9);
    CHECK(sol.duals.minCoeff() >= 0.0);
    const BeamMatrix w = recover_beam_matrix(sol.x_opt, in.symbols);
    const double tau = std::sqrt(in.link.gamma[0] * in.link.noise_power);
    CHECK(min_ci_margin(in.snap.effective, in.symbols, w, in.link) >= -1e-9 * tau);
    // stationarity: z lies in the cone of the active normals
    const Eigen::VectorXd z = stacked_from_complex(sol.x_opt);
    CHECK((z - qp.A.transpose() * sol.duals).norm() <= 1e-9 * z.norm());
  }
}

TEST_CASE("reduced problem equals the full beam-matrix problem") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    Instance in = random_instance(rng, 2, 2, 2);
    const QPSolution reduced = solve_min_power(qp_of(in));
    const QPSolution full = active_set_qp_oracle(full_w_qp(in));
    REQUIRE(full.feasible);
    REQUIRE(reduced.feasible);
    CHECK(reduced.power == doctest::Approx(full.power).epsilon(1e-8));
  }
}

TEST_CASE("power scales as 1/c^2 with the channel") {
  std::mt19937_64 rng(3);
  Instance in = random_instance(rng, 4, 3);
  const QPSolution a = solve_min_power(qp_of(in));
  Instance scaled = in;
  scaled.snap.effective *= 3.0;
  const QPSolution b = solve_min_power(qp_of(scaled));
  CHECK(b.power == doctest::Approx(a.power / 9.0).epsilon(1e-9));
}

TEST_CASE("relaxing one SINR target never increases power") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    Instance in = random_instance(rng, 4, 4);
    const QPSolution base = solve_min_power(qp_of(in));
    Instance relaxed = in;
    relaxed.link.gamma[trial % 4] *= 0.5;
    const QPSolution r = solve_min_power(qp_of(relaxed));
    CHECK(r.power <= base.power * (1 + 1e-12));
  }
}

TEST_CASE("solver is deterministic") {
  std::mt19937_64 rng(5);
  Instance in = random_instance(rng, 4, 4);
  const QPSolution a = solve_min_power(qp_of(in));
  const QPSolution b = solve_min_power(qp_of(in));
  CHECK(a.power == b.power);
  CHECK(a.x_opt == b.x_opt);
}

TEST_CASE("conflicting constructive regions are infeasible") {
  // one waveguide, two users on identical channels with opposite symbols
  Eigen::MatrixXcd eff(2, 1);
  eff << cdouble(1e-4, 0.0), cdouble(1e-4, 0.0);
  SymbolVector s{Eigen::VectorXcd(2), 4};
  s.s << psk_point(0, 4), psk_point(2, 4);
  const LinkBudget link = testing::link_for(2, 10.0);
  const QPInstance qp = build_ci_qp(eff, s, link.gamma, link.noise_power, link.theta_th);
  const QPSolution sol = solve_min_power(qp, {.tol = 1e-9, .max_sweeps = 2000});
  CHECK_FALSE(sol.feasible);
  CHECK_FALSE(active_set_qp_oracle(qp).feasible);
}

TEST_CASE("build_ci_qp rejects bad inputs") {
  Eigen::MatrixXcd eff = Eigen::MatrixXcd::Ones(2, 2);
  SymbolVector s{Eigen::VectorXcd::Ones(2), 4};
  const std::vector<double> bad_gamma{1.0, 0.0};
  CHECK_THROWS_AS(build_ci_qp(eff, s, bad_gamma, 1e-11, 0.7), std::invalid_argument);
  const std::vector<double> short_gamma{1.0};
  CHECK_THROWS_AS(build_ci_qp(eff, s, short_gamma, 1e-11, 0.7), std::invalid_argument);
}

TEST_CASE("recover_beam_matrix and transmit_power") {
  std::mt19937_64 rng(6);
  SymbolVector one{Eigen::VectorXcd::Ones(1), 4};
  const Eigen::VectorXcd x = Eigen::VectorXcd::Random(3);
  const BeamMatrix w1 = recover_beam_matrix(x, one);
  CHECK(w1.w.cols() == 1);
  CHECK((w1.w.col(0) - x).norm() < 1e-15);

  for (int trial = 0; trial < 20; ++trial) {
    const int K = 1 + trial % 5;
    const SymbolVector s = draw_psk_symbols(K, 8, rng);
    const Eigen::VectorXcd xv = Eigen::VectorXcd::Random(4);
    const BeamMatrix w = recover_beam_matrix(xv, s);
    CHECK((w.w * s.s - xv).norm() <= 1e-12 * xv.norm());
    CHECK(transmit_power(w) * K == doctest::Approx(xv.squaredNorm()).epsilon(1e-12));
  }

  CHECK(transmit_power({Eigen::MatrixXcd::Zero(3, 2)}) == 0.0);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(3, 2);
  m(1, 1) = 2.0;
  CHECK(transmit_power({m}) == doctest::Approx(4.0));
}

TEST_CASE("kkt_residual flags a perturbed solution") {
  std::mt19937_64 rng(8);
  Instance in = random_instance(rng, 4, 3);
  const QPInstance qp = qp_of(in);
  const QPSolution sol = solve_min_power(qp);
  const Eigen::VectorXd z = stacked_from_complex(sol.x_opt);
  CHECK(kkt_residual(qp, z, sol.duals) <= 1e-9);
  CHECK(kkt_residual(qp, 0.9 * z, sol.duals) > 1e-3);
}
