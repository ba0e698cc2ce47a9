// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pinslp Authors
//
// Symbol-level precoding under constructive-interference constraints.
//
// For a fixed placement the CI constraints depend on the beam matrix W only
// through the transmitted vector x = W s. The solver therefore works on the
// 2N real unknowns z = [Re x; Im x]:
//
//     minimise ||z||^2   subject to   A z >= b,
//
// where every user contributes the two rows
//     tan(theta) * Re(lambda_k) +/- Im(lambda_k) >= tan(theta) * sqrt(gamma_k sigma^2).
//
// The minimum-Frobenius-norm W with W s = x is x s^H / K, so the transmit
// power of Problem-style sum ||w_k||^2 equals ||x||^2 / K.

#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "pinslp/channel.hpp"
#include "pinslp/signal.hpp"

namespace pinslp {

struct ConstraintTag {
  int user = 0;
  int branch = +1;  // sign applied to Im(lambda_k)
};

struct QPInstance {
  Eigen::MatrixXd A;  // rows x 2n
  Eigen::VectorXd b;
  std::vector<ConstraintTag> tags;
  // Transmit power = power_scale * ||z||^2 (1/K for the reduced problem).
  double power_scale = 1.0;

  int num_rows() const { return static_cast<int>(A.rows()); }
  int num_vars() const { return static_cast<int>(A.cols()); }
};

struct QPSolution {
  Eigen::VectorXcd x_opt;  // complex view of z (first half real, second half imaginary)
  double power = 0.0;
  Eigen::VectorXd duals;  // multipliers of A z >= b for min 0.5 ||z||^2
  double kkt_residual = 0.0;
  bool feasible = false;
  int sweeps = 0;
  bool used_fallback = false;
};

QPInstance build_ci_qp(const ChannelSnapshot& snapshot, const SymbolVector& symbols,
                       std::span<const double> gamma, double noise_power, double theta_th);

// Same as above from a bare K x N effective-channel matrix.
QPInstance build_ci_qp(const Eigen::MatrixXcd& effective, const SymbolVector& symbols,
                       std::span<const double> gamma, double noise_power, double theta_th);

struct QPSolverOptions {
  double tol = 1e-9;
  int max_sweeps = 200000;
  int polish_every = 8;
  // Fall back to active-set enumeration when ascent stalls and rows <= this.
  int fallback_max_rows = 8;
};

// Scale-free KKT residual of (z, mu) for min 0.5||z||^2 s.t. A z >= b. Rows are
// normalised to unit length; the result is the largest of relative
// stationarity, primal infeasibility, dual infeasibility and complementarity.
double kkt_residual(const QPInstance& qp, const Eigen::VectorXd& z, const Eigen::VectorXd& duals);

// Hildreth-style dual coordinate ascent with an exact active-set polish.
QPSolution solve_min_power(const QPInstance& qp, const QPSolverOptions& options = {});

Eigen::VectorXcd complex_from_stacked(const Eigen::VectorXd& z);
Eigen::VectorXd stacked_from_complex(const Eigen::VectorXcd& x);

// W = x s^H / K.
BeamMatrix recover_beam_matrix(const Eigen::VectorXcd& x_opt, const SymbolVector& symbols);

double transmit_power(const BeamMatrix& beams);

}  // namespace pinslp
