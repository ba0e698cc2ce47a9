// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pinslp Authors

#include "pinslp/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pinslp {

WaveformParams WaveformParams::from_carrier(double carrier_freq, double n_eff) {
  if (!(carrier_freq > 0.0) || !(n_eff > 0.0))
    throw std::invalid_argument("WaveformParams: carrier frequency and n_eff must be positive");
  WaveformParams p;
  p.carrier_freq = carrier_freq;
  p.n_eff = n_eff;
  p.wavelength = kSpeedOfLight / carrier_freq;
  p.guided_wavelength = p.wavelength / n_eff;
  p.eta = kSpeedOfLight / (4.0 * std::numbers::pi * carrier_freq);
  p.beta0 = 2.0 * std::numbers::pi / p.wavelength;
  p.beta1 = 2.0 * std::numbers::pi / p.guided_wavelength;
  return p;
}

Eigen::VectorXcd waveguide_phase_vector(std::span<const double> x, const WaveformParams& params) {
  const double norm = 1.0 / std::sqrt(static_cast<double>(x.size()));
  Eigen::VectorXcd f(static_cast<Eigen::Index>(x.size()));
  for (std::size_t l = 0; l < x.size(); ++l) f(l) = std::polar(norm, -params.beta1 * x[l]);
  return f;
}

Eigen::VectorXcd freespace_channel(const Vec3& user, std::span<const Vec3> pa_positions,
                                   const WaveformParams& params) {
  Eigen::VectorXcd h(static_cast<Eigen::Index>(pa_positions.size()));
  for (std::size_t l = 0; l < pa_positions.size(); ++l) {
    const double q = user_pa_distance(user, pa_positions[l]);
    h(l) = std::polar(params.eta / q, -params.beta0 * q);
  }
  return h;
}

ChannelSnapshot effective_channels(const SystemGeometry& geom, const PlacementMatrix& placement,
                                   const WaveformParams& params) {
  const int N = geom.num_waveguides();
  const int L = geom.pas_per_waveguide;
  const int K = geom.num_users();
  if (placement.num_waveguides() != N || placement.pas_per_waveguide() != L)
    throw std::invalid_argument("effective_channels: placement shape does not match geometry");

  ChannelSnapshot snap;
  snap.effective.resize(K, N);
  snap.raw.assign(K, Eigen::MatrixXcd(N, L));
  snap.distance.assign(K, Eigen::MatrixXd(N, L));

  std::vector<Vec3> pas(L);
  std::vector<double> xs(L);
  for (int n = 0; n < N; ++n) {
    for (int l = 0; l < L; ++l) {
      xs[l] = placement(n, l);
      pas[l] = pa_position(geom, n, l, xs[l]);
    }
    const Eigen::VectorXcd f = waveguide_phase_vector(xs, params);
    for (int k = 0; k < K; ++k) {
      const Eigen::VectorXcd h = freespace_channel(geom.users[k], pas, params);
      for (int l = 0; l < L; ++l) {
        snap.raw[k](n, l) = h(l);
        snap.distance[k](n, l) = user_pa_distance(geom.users[k], pas[l]);
      }
      snap.effective(k, n) = (h.transpose() * f)(0);
    }
  }
  return snap;
}

cdouble received_lambda(const ChannelSnapshot& snapshot, const BeamMatrix& beams,
                        const SymbolVector& symbols, int k) {
  const cdouble y = (snapshot.effective.row(k) * (beams.w * symbols.s))(0);
  return y / symbols[k];
}

double sinr(const ChannelSnapshot& snapshot, const BeamMatrix& beams, int k, double noise_power) {
  if (!(noise_power > 0.0)) throw std::invalid_argument("sinr: noise power must be positive");
  const Eigen::RowVectorXcd gains = snapshot.effective.row(k) * beams.w;
  double interference = 0.0;
  for (int i = 0; i < gains.size(); ++i)
    if (i != k) interference += std::norm(gains(i));
  return std::norm(gains(k)) / (interference + noise_power);
}

double ci_margin(cdouble lambda, double gamma, double noise_power, double theta_th) {
  return (lambda.real() - std::sqrt(gamma * noise_power)) * std::tan(theta_th) -
         std::abs(lambda.imag());
}

}  // namespace pinslp
