// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pinslp Authors

#include "pinslp/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/QR>

namespace pinslp {

OracleReport compare_to_oracle(std::string quantity, double main_value, double oracle_value,
                               double rel_tol) {
  OracleReport r;
  r.quantity = std::move(quantity);
  r.main_value = main_value;
  r.oracle_value = oracle_value;
  r.abs_error = std::abs(main_value - oracle_value);
  const double denom = std::max(std::abs(oracle_value), std::numeric_limits<double>::min());
  r.rel_error = r.abs_error / denom;
  r.pass = r.rel_error <= rel_tol;
  return r;
}

double fd_gradient(const std::function<double(double)>& objective, double x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("fd_gradient: step must be positive");
  return (objective(x + h) - objective(x - h)) / (2.0 * h);
}

GridSearchResult grid_search_position(const SubproblemTerms& terms, const MovableRegion& region,
                                      double eps, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("grid_search_position: step must be positive");
  GridSearchResult res;
  const auto count = static_cast<long>(std::floor(region.width() / step + 1e-9));
  double prev = 0.0;
  auto visit = [&](double x, long i) {
    const double f = subproblem_objective(terms, x, eps);
    if (i == 0 || f < res.f_best) {
      res.f_best = f;
      res.x_best = x;
    }
    if (i > 0) res.lipschitz = std::max(res.lipschitz, std::abs(f - prev) / step);
    prev = f;
    ++res.points;
  };
  for (long i = 0; i <= count; ++i) visit(region.lower + static_cast<double>(i) * step, i);
  if (region.lower + static_cast<double>(count) * step < region.upper)
    visit(region.upper, count + 1);
  return res;
}

QPSolution active_set_qp_oracle(const QPInstance& qp) {
  const int m = qp.num_rows();
  const int n = qp.num_vars();
  if (m > 12) throw std::invalid_argument("active_set_qp_oracle: too many constraints to enumerate");

  QPSolution best;
  best.duals = Eigen::VectorXd::Zero(m);
  best.x_opt = Eigen::VectorXcd::Zero(n / 2);
  double best_norm = std::numeric_limits<double>::infinity();

  const double bscale = std::max(qp.b.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());

  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    std::vector<int> rows;
    for (int i = 0; i < m; ++i)
      if (mask & (1u << i)) rows.push_back(i);
    const int s = static_cast<int>(rows.size());
    if (s > n) continue;

    Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd mult = Eigen::VectorXd::Zero(s);
    if (s > 0) {
      Eigen::MatrixXd As(s, n);
      Eigen::VectorXd bs(s);
      for (int a = 0; a < s; ++a) {
        As.row(a) = qp.A.row(rows[a]);
        bs(a) = qp.b(rows[a]);
      }
      // Minimum-norm solution of As z = bs.
      z = As.completeOrthogonalDecomposition().solve(bs);
      if (!z.allFinite() || (As * z - bs).norm() > 1e-9 * std::max(bs.norm(), bscale)) continue;
      // z = As^T mult
      const Eigen::MatrixXd At = As.transpose();
      mult = At.completeOrthogonalDecomposition().solve(z);
      if (!mult.allFinite() || (At * mult - z).norm() > 1e-9 * std::max(z.norm(), 1e-300)) continue;
      if (mult.minCoeff() < -1e-10 * std::max(mult.cwiseAbs().maxCoeff(), 1e-300)) continue;
    }
    const Eigen::VectorXd slack = qp.A * z - qp.b;
    bool feasible = true;
    for (int i = 0; i < m; ++i) {
      if (slack(i) < -1e-10 * std::max(std::abs(qp.b(i)), bscale)) {
        feasible = false;
        break;
      }
    }
    if (!feasible) continue;
    const double norm = z.squaredNorm();
    if (norm < best_norm) {
      best_norm = norm;
      best.feasible = true;
      best.x_opt = complex_from_stacked(z);
      best.power = qp.power_scale * norm;
      best.duals.setZero();
      for (int a = 0; a < s; ++a) best.duals(rows[a]) = std::max(mult(a), 0.0);
    }
  }
  return best;
}

}  // namespace pinslp
