// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pinslp Authors

#include "pinslp/precoder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>

#include "pinslp/oracles.hpp"

namespace pinslp {

QPInstance build_ci_qp(const Eigen::MatrixXcd& effective, const SymbolVector& symbols,
                       std::span<const double> gamma, double noise_power, double theta_th) {
  const int K = static_cast<int>(effective.rows());
  const int N = static_cast<int>(effective.cols());
  if (symbols.size() != K || static_cast<int>(gamma.size()) != K)
    throw std::invalid_argument("build_ci_qp: symbols/gamma size must equal the user count");
  if (!(noise_power > 0.0)) throw std::invalid_argument("build_ci_qp: noise power must be positive");

  const double t = std::tan(theta_th);
  QPInstance qp;
  qp.A.resize(2 * K, 2 * N);
  qp.b.resize(2 * K);
  qp.tags.resize(2 * K);
  qp.power_scale = 1.0 / K;

  for (int k = 0; k < K; ++k) {
    if (!(gamma[k] > 0.0)) throw std::invalid_argument("build_ci_qp: gamma must be positive");
    // lambda_k = a_k x with a_k = h_k conj(s_k)
    const Eigen::RowVectorXcd a = effective.row(k) * std::conj(symbols[k]);
    const Eigen::RowVectorXd ar = a.real();
    const Eigen::RowVectorXd ai = a.imag();
    const double rhs = t * std::sqrt(gamma[k] * noise_power);
    for (int branch : {+1, -1}) {
      const int row = 2 * k + (branch > 0 ? 0 : 1);
      // Re(lambda) = ar.xr - ai.xi ; Im(lambda) = ai.xr + ar.xi
      qp.A.row(row).head(N) = t * ar + branch * ai;
      qp.A.row(row).tail(N) = -t * ai + branch * ar;
      qp.b(row) = rhs;
      qp.tags[row] = {k, branch};
    }
  }
  return qp;
}

QPInstance build_ci_qp(const ChannelSnapshot& snapshot, const SymbolVector& symbols,
                       std::span<const double> gamma, double noise_power, double theta_th) {
  return build_ci_qp(snapshot.effective, symbols, gamma, noise_power, theta_th);
}

Eigen::VectorXcd complex_from_stacked(const Eigen::VectorXd& z) {
  const Eigen::Index n = z.size() / 2;
  Eigen::VectorXcd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = {z(i), z(n + i)};
  return x;
}

Eigen::VectorXd stacked_from_complex(const Eigen::VectorXcd& x) {
  Eigen::VectorXd z(2 * x.size());
  z.head(x.size()) = x.real();
  z.tail(x.size()) = x.imag();
  return z;
}

namespace {

// Rows scaled to unit norm and right-hand side scaled so max |b| = 1.
struct NormalizedQP {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::VectorXd row_norm;
  double scale = 1.0;
};

NormalizedQP normalize(const QPInstance& qp) {
  NormalizedQP out;
  out.row_norm = qp.A.rowwise().norm();
  out.A = qp.A;
  out.b = qp.b;
  for (int i = 0; i < qp.num_rows(); ++i) {
    if (out.row_norm(i) > 0.0) {
      out.A.row(i) /= out.row_norm(i);
      out.b(i) /= out.row_norm(i);
    }
  }
  const double bmax = out.b.size() ? out.b.cwiseAbs().maxCoeff() : 0.0;
  out.scale = bmax > 0.0 ? bmax : 1.0;
  out.b /= out.scale;
  return out;
}

double normalized_kkt(const NormalizedQP& nq, const Eigen::VectorXd& y, const Eigen::VectorXd& nu) {
  const double ynorm = std::max(y.norm(), 1.0);
  const Eigen::VectorXd slack = nq.A * y - nq.b;
  double res = (y - nq.A.transpose() * nu).norm() / ynorm;
  for (Eigen::Index i = 0; i < slack.size(); ++i) {
    res = std::max(res, -slack(i));
    res = std::max(res, -nu(i) / ynorm);
    res = std::max(res, std::abs(nu(i) * slack(i)) / (ynorm * ynorm));
  }
  return res;
}

}  // namespace

double kkt_residual(const QPInstance& qp, const Eigen::VectorXd& z, const Eigen::VectorXd& duals) {
  const NormalizedQP nq = normalize(qp);
  Eigen::VectorXd nu = duals.cwiseProduct(nq.row_norm) / nq.scale;
  return normalized_kkt(nq, z / nq.scale, nu);
}

QPSolution solve_min_power(const QPInstance& qp, const QPSolverOptions& options) {
  const int m = qp.num_rows();
  const int n = qp.num_vars();
  QPSolution sol;
  sol.duals = Eigen::VectorXd::Zero(m);

  auto finish = [&](const NormalizedQP& nq, const Eigen::VectorXd& nu, double res, int sweeps) {
    const Eigen::VectorXd z = nq.scale * (nq.A.transpose() * nu);
    sol.x_opt = complex_from_stacked(z);
    sol.power = qp.power_scale * z.squaredNorm();
    for (int i = 0; i < m; ++i)
      sol.duals(i) = nq.row_norm(i) > 0.0 ? nu(i) * nq.scale / nq.row_norm(i) : 0.0;
    sol.kkt_residual = res;
    sol.feasible = res <= options.tol;
    sol.sweeps = sweeps;
    return sol;
  };

  const NormalizedQP nq = normalize(qp);
  for (int i = 0; i < m; ++i) {
    if (nq.row_norm(i) == 0.0 && qp.b(i) > 0.0) {
      sol.x_opt = Eigen::VectorXcd::Zero(n / 2);
      sol.kkt_residual = std::numeric_limits<double>::infinity();
      return sol;  // 0 >= b with b > 0
    }
  }

  const Eigen::MatrixXd G = nq.A * nq.A.transpose();
  Eigen::VectorXd nu = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd gnu = Eigen::VectorXd::Zero(m);  // G * nu
  if (m == 0) return finish(nq, nu, 0.0, 0);

  constexpr double kDivergence = 1e14;
  int sweep = 0;
  for (; sweep < options.max_sweeps; ++sweep) {
    for (int i = 0; i < m; ++i) {
      if (G(i, i) <= 0.0) continue;
      const double updated = std::max(0.0, nu(i) + (nq.b(i) - gnu(i)) / G(i, i));
      const double delta = updated - nu(i);
      if (delta != 0.0) {
        gnu += delta * G.col(i);
        nu(i) = updated;
      }
    }
    if ((sweep + 1) % options.polish_every != 0) continue;

    const Eigen::VectorXd y = nq.A.transpose() * nu;
    const double res = normalized_kkt(nq, y, nu);
    if (res <= options.tol) return finish(nq, nu, res, sweep + 1);

    // Solve the equality system on the current support exactly.
    std::vector<int> support;
    for (int i = 0; i < m; ++i)
      if (nu(i) > 0.0) support.push_back(i);
    if (!support.empty() && static_cast<int>(support.size()) <= n) {
      const int s = static_cast<int>(support.size());
      Eigen::MatrixXd Gs(s, s);
      Eigen::VectorXd bs(s);
      for (int a = 0; a < s; ++a) {
        bs(a) = nq.b(support[a]);
        for (int c = 0; c < s; ++c) Gs(a, c) = G(support[a], support[c]);
      }
      const Eigen::LDLT<Eigen::MatrixXd> ldlt(Gs);
      if (ldlt.info() == Eigen::Success) {
        const Eigen::VectorXd v = ldlt.solve(bs);
        if (v.allFinite() && v.minCoeff() >= 0.0) {
          Eigen::VectorXd trial = Eigen::VectorXd::Zero(m);
          for (int a = 0; a < s; ++a) trial(support[a]) = v(a);
          const double tres = normalized_kkt(nq, nq.A.transpose() * trial, trial);
          if (tres <= options.tol) return finish(nq, trial, tres, sweep + 1);
        }
      }
    }
    if (nu.maxCoeff() > kDivergence) break;
  }

  if (m <= options.fallback_max_rows) {
    QPSolution fb = active_set_qp_oracle(qp);
    fb.used_fallback = true;
    fb.sweeps = sweep;
    if (fb.feasible) fb.kkt_residual = kkt_residual(qp, stacked_from_complex(fb.x_opt), fb.duals);
    fb.feasible = fb.feasible && fb.kkt_residual <= options.tol;
    return fb;
  }
  const double res = normalized_kkt(nq, nq.A.transpose() * nu, nu);
  return finish(nq, nu, res, sweep);
}

BeamMatrix recover_beam_matrix(const Eigen::VectorXcd& x_opt, const SymbolVector& symbols) {
  const double K = static_cast<double>(symbols.size());
  return {x_opt * symbols.s.adjoint() / K};
}

double transmit_power(const BeamMatrix& beams) { return beams.w.squaredNorm(); }

}  // namespace pinslp
