// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pinslp Authors

#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "pinslp/channel.hpp"
#include "pinslp/placement.hpp"
#include "test_support.hpp"

using namespace pinslp;
using pinslp::testing::params28;

TEST_CASE("waveform parameters at 28 GHz") {
  const WaveformParams p = params28();
  // c / (4 pi f_c) with c = 2.99792458e8
  CHECK(p.eta == doctest::Approx(8.52025921e-4).epsilon(1e-8));
  CHECK(p.wavelength / 2.0 == doctest::Approx(5.35343675e-3).epsilon(1e-8));
  CHECK(p.guided_wavelength < p.wavelength);
  CHECK(p.beta1 == doctest::Approx(p.n_eff * p.beta0));
  CHECK(p.eta == doctest::Approx(p.wavelength / (4.0 * std::numbers::pi)));
  CHECK_THROWS(WaveformParams::from_carrier(-1.0, 1.4));
}

TEST_CASE("waveguide_phase_vector") {
  const WaveformParams p = params28();
  const double zero[] = {0.0};
  auto f = waveguide_phase_vector(zero, p);
  CHECK(std::abs(f(0) - cdouble(1.0, 0.0)) < 1e-15);

  const double half[] = {p.guided_wavelength / 2.0};
  f = waveguide_phase_vector(half, p);
  CHECK(std::abs(f(0) - cdouble(-1.0, 0.0)) < 1e-12);

  const double two[] = {0.0, p.guided_wavelength};
  f = waveguide_phase_vector(two, p);
  CHECK(std::abs(f(0) - cdouble(1.0 / std::sqrt(2.0), 0.0)) < 1e-12);
  CHECK(std::abs(f(1) - cdouble(1.0 / std::sqrt(2.0), 0.0)) < 1e-12);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 20.0);
  for (int L = 1; L <= 8; ++L) {
    std::vector<double> xs(L);
    for (auto& x : xs) x = u(rng);
    f = waveguide_phase_vector(xs, p);
    CHECK(f.norm() == doctest::Approx(1.0).epsilon(1e-14));
    for (int l = 0; l < L; ++l) CHECK(std::abs(f(l)) == doctest::Approx(1.0 / std::sqrt(L)));
  }
}

TEST_CASE("freespace_channel") {
  const WaveformParams p = params28();
  const Vec3 user{4.0, 7.0, 0.0};
  const Vec3 above[] = {{4.0, 7.0, 5.0}};
  const auto h = freespace_channel(user, above, p);
  CHECK(std::abs(h(0)) == doctest::Approx(1.70405184e-4).epsilon(1e-8));
  CHECK(std::arg(h(0)) == doctest::Approx(std::remainder(-p.beta0 * 5.0, 2 * std::numbers::pi)));

  double prev = std::abs(h(0));
  for (double dx = 0.5; dx < 10.0; dx += 0.5) {
    const Vec3 pa[] = {{4.0 + dx, 7.0, 5.0}};
    const double mod = std::abs(freespace_channel(user, pa, p)(0));
    CHECK(mod < prev);
    prev = mod;
  }
}

namespace {

// Explicit H_k (1 x NL) times block-diagonal F (NL x N).
Eigen::RowVectorXcd dense_effective_row(const SystemGeometry& g, const PlacementMatrix& X,
                                        const WaveformParams& p, int k) {
  const int N = g.num_waveguides(), L = g.pas_per_waveguide;
  Eigen::RowVectorXcd H(N * L);
  Eigen::MatrixXcd F = Eigen::MatrixXcd::Zero(N * L, N);
  for (int n = 0; n < N; ++n) {
    for (int l = 0; l < L; ++l) {
      const double dx = g.users[k].x - X(n, l);
      const double dy = g.users[k].y - g.waveguide_y[n];
      const double q = std::sqrt(dx * dx + dy * dy + g.height * g.height);
      H(n * L + l) = p.eta / q * std::exp(cdouble(0.0, -2.0 * std::numbers::pi / p.wavelength * q));
      F(n * L + l, n) = std::exp(cdouble(0.0, -2.0 * std::numbers::pi / p.guided_wavelength * X(n, l))) /
                        std::sqrt(static_cast<double>(L));
    }
  }
  return H * F;
}

}  // namespace

TEST_CASE("effective_channels") {
  const WaveformParams p = params28();
  std::mt19937_64 rng(5);

  SUBCASE("single waveguide single PA") {
    SystemGeometry g = testing::random_geometry(rng, 1, 1, 1);
    PlacementMatrix X(1, 1);
    X(0, 0) = 3.3;
    const auto snap = effective_channels(g, X, p);
    const cdouble expect = snap.raw[0](0, 0) * std::polar(1.0, -p.beta1 * 3.3);
    CHECK(std::abs(snap.effective(0, 0) - expect) < 1e-18);
  }

  SUBCASE("matches the dense matrix-product oracle") {
    for (int trial = 0; trial < 20; ++trial) {
      SystemGeometry g = testing::random_geometry(rng, 4, 1 + trial % 6, 4);
      const PlacementMatrix X = testing::random_valid_placement(rng, g);
      const auto snap = effective_channels(g, X, p);
      for (int k = 0; k < 4; ++k) {
        const Eigen::RowVectorXcd ref = dense_effective_row(g, X, p, k);
        for (int n = 0; n < 4; ++n) CHECK(std::abs(snap.effective(k, n) - ref(n)) < 1e-12 * p.eta);
        for (int n = 0; n < 4; ++n)
          for (int l = 0; l < g.pas_per_waveguide; ++l) {
            CHECK(std::abs(snap.raw[k](n, l)) ==
                  doctest::Approx(p.eta / snap.distance[k](n, l)).epsilon(1e-14));
          }
        // triangle inequality on each waveguide sum
        for (int n = 0; n < 4; ++n) {
          double bound = 0.0;
          for (int l = 0; l < g.pas_per_waveguide; ++l) bound += p.eta / snap.distance[k](n, l);
          bound /= std::sqrt(static_cast<double>(g.pas_per_waveguide));
          CHECK(std::abs(snap.effective(k, n)) <= bound * (1 + 1e-12));
        }
      }
    }
  }

  SUBCASE("PA order inside a waveguide does not matter") {
    SystemGeometry g = testing::random_geometry(rng, 2, 4, 3);
    PlacementMatrix X = testing::random_valid_placement(rng, g);
    PlacementMatrix Y = X;
    for (int n = 0; n < 2; ++n) Y.coords.row(n) = X.coords.row(n).reverse();
    const auto a = effective_channels(g, X, p);
    const auto b = effective_channels(g, Y, p);
    CHECK((a.effective - b.effective).norm() < 1e-15 * a.effective.norm() + 1e-20);
  }
}

TEST_CASE("received_lambda") {
  const WaveformParams p = params28();
  std::mt19937_64 rng(9);

  SUBCASE("single user without rotation") {
    SystemGeometry g = testing::random_geometry(rng, 3, 2, 1);
    const PlacementMatrix X = fixed_uniform_placement(g);
    const auto snap = effective_channels(g, X, p);
    const BeamMatrix w = testing::random_beams(rng, 3, 1);
    SymbolVector s{Eigen::VectorXcd::Ones(1), 4};
    const cdouble expect = (snap.effective.row(0) * w.w.col(0))(0);
    CHECK(std::abs(received_lambda(snap, w, s, 0) - expect) < 1e-18);
  }

  SUBCASE("linear in W, invariant to a common symbol rotation, equal to the triple sum") {
    for (int trial = 0; trial < 50; ++trial) {
      const int K = 1 + trial % 4;
      SystemGeometry g = testing::random_geometry(rng, 4, 1 + trial % 5, K);
      const PlacementMatrix X = testing::random_valid_placement(rng, g);
      const auto snap = effective_channels(g, X, p);
      const BeamMatrix w = testing::random_beams(rng, 4, K);
      const SymbolVector s = draw_psk_symbols(K, 4, rng);
      for (int k = 0; k < K; ++k) {
        const cdouble lam = received_lambda(snap, w, s, k);
        const BeamMatrix w2{w.w * 2.5};
        CHECK(std::abs(received_lambda(snap, w2, s, k) - 2.5 * lam) <= 1e-12 * std::abs(lam));

        // a common rotation of all symbols cancels against the reference s_k
        const cdouble rot = std::polar(1.0, 0.7);
        SymbolVector sr{s.s * rot, 4};
        CHECK(std::abs(received_lambda(snap, w, sr, k) - lam) <= 1e-12 * std::abs(lam));

        const cdouble triple = lambda_triple_sum(g, X, p, w, s, k);
        CHECK(std::abs(triple - lam) <= 1e-10 * std::abs(lam));
      }
    }
  }
}

TEST_CASE("sinr") {
  const WaveformParams p = params28();
  std::mt19937_64 rng(13);
  SystemGeometry g = testing::random_geometry(rng, 4, 3, 3);
  const auto snap = effective_channels(g, fixed_uniform_placement(g), p);

  SUBCASE("single user") {
    ChannelSnapshot one = snap;
    one.effective = snap.effective.topRows(1);
    const BeamMatrix w = testing::random_beams(rng, 4, 1);
    const double sig = std::norm((one.effective * w.w)(0, 0));
    CHECK(sinr(one, w, 0, 1e-11) == doctest::Approx(sig / 1e-11));
  }
  SUBCASE("zero-forcing interference and noise doubling") {
    // make w_1, w_2 orthogonal to user 0's effective row
    const Eigen::RowVectorXcd h0 = snap.effective.row(0);
    BeamMatrix w = testing::random_beams(rng, 4, 3);
    for (int i = 1; i < 3; ++i) {
      const Eigen::VectorXcd v = w.w.col(i);
      const cdouble proj = (h0 * v)(0) / h0.squaredNorm();
      w.w.col(i) = v - proj * h0.adjoint();
    }
    const double sig = std::norm((h0 * w.w.col(0))(0));
    CHECK(sinr(snap, w, 0, 1e-11) == doctest::Approx(sig / 1e-11).epsilon(1e-9));
    CHECK(sinr(snap, w, 0, 2e-11) == doctest::Approx(sinr(snap, w, 0, 1e-11) / 2).epsilon(1e-9));
  }
  CHECK_THROWS(sinr(snap, testing::random_beams(rng, 4, 3), 0, 0.0));
}

TEST_CASE("ci_margin") {
  const double gamma = 100.0, noise = 1e-11;
  const double tau = std::sqrt(gamma * noise);
  CHECK(ci_margin({tau, 0.0}, gamma, noise, std::numbers::pi / 4) == doctest::Approx(0.0));
  CHECK(ci_margin({2 * tau, 0.0}, gamma, noise, std::numbers::pi / 4) == doctest::Approx(tau));
  const cdouble lam{1.7 * tau, 0.3 * tau};
  CHECK(ci_margin(lam, gamma, noise, 0.5) == ci_margin(std::conj(lam), gamma, noise, 0.5));
  CHECK(ci_margin({tau, 0.1 * tau}, gamma, noise, 0.5) < 0.0);
}
