// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pinslp Authors
//
// Line-of-sight channel between pinching antennas and ground users. Every PA
// contributes (eta / q) * exp(-j(beta0 * q + beta1 * x)) / sqrt(L) to the
// effective channel of its waveguide, where q is the PA-user distance and x
// the PA coordinate along the waveguide.

#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "pinslp/geometry.hpp"
#include "pinslp/signal.hpp"

namespace pinslp {

inline constexpr double kSpeedOfLight = 2.99792458e8;  // m/s

struct WaveformParams {
  double carrier_freq = 2.8e10;  // Hz
  double n_eff = 1.4;
  double wavelength = 0.0;         // free-space lambda [m]
  double guided_wavelength = 0.0;  // lambda / n_eff [m]
  double eta = 0.0;                // c / (4 pi f_c) [m]
  double beta0 = 0.0;              // 2 pi / lambda [rad/m]
  double beta1 = 0.0;              // 2 pi / lambda_g [rad/m]

  static WaveformParams from_carrier(double carrier_freq, double n_eff);
};

// Effective channels for one placement. `effective` is K x N with row k equal
// to H_k(X) F(X). `raw[k]` (N x L) holds the per-PA free-space entries and
// `distance[k]` the matching PA-user distances.
struct ChannelSnapshot {
  Eigen::MatrixXcd effective;
  std::vector<Eigen::MatrixXcd> raw;
  std::vector<Eigen::MatrixXd> distance;

  int num_users() const { return static_cast<int>(effective.rows()); }
  int num_waveguides() const { return static_cast<int>(effective.cols()); }
};

// (1/sqrt(L)) exp(-j beta1 x_l) for each PA on one waveguide.
Eigen::VectorXcd waveguide_phase_vector(std::span<const double> x, const WaveformParams& params);

// eta exp(-j beta0 q_l) / q_l for each PA position.
Eigen::VectorXcd freespace_channel(const Vec3& user, std::span<const Vec3> pa_positions,
                                   const WaveformParams& params);

ChannelSnapshot effective_channels(const SystemGeometry& geom, const PlacementMatrix& placement,
                                   const WaveformParams& params);

// lambda_k = H_k F W s / s_k.
cdouble received_lambda(const ChannelSnapshot& snapshot, const BeamMatrix& beams,
                        const SymbolVector& symbols, int k);

double sinr(const ChannelSnapshot& snapshot, const BeamMatrix& beams, int k, double noise_power);

// (Re(lambda) - sqrt(gamma sigma^2)) tan(theta) - |Im(lambda)|; nonnegative iff the
// noise-free received point lies in the constructive region.
double ci_margin(cdouble lambda, double gamma, double noise_power, double theta_th);

}  // namespace pinslp
