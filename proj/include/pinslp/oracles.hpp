// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pinslp Authors
//
// Brute-force reference computations. They are slow on purpose and are only
// used by tests, the acceptance suite and the small-QP fallback.

#pragma once

#include <functional>
#include <string>

#include "pinslp/geometry.hpp"
#include "pinslp/placement.hpp"
#include "pinslp/precoder.hpp"

namespace pinslp {

struct OracleReport {
  std::string quantity;
  double main_value = 0.0;
  double oracle_value = 0.0;
  double abs_error = 0.0;
  double rel_error = 0.0;
  bool pass = false;
};

OracleReport compare_to_oracle(std::string quantity, double main_value, double oracle_value,
                               double rel_tol);

// Central difference (f(x + h) - f(x - h)) / 2h.
double fd_gradient(const std::function<double(double)>& objective, double x, double h);

struct GridSearchResult {
  double x_best = 0.0;
  double f_best = 0.0;
  double lipschitz = 0.0;  // max |f(x_{i+1}) - f(x_i)| / step over the grid
  int points = 0;
};

// Evaluates subproblem_objective on {lower, lower + step, ..., upper}.
GridSearchResult grid_search_position(const SubproblemTerms& terms, const MovableRegion& region,
                                      double eps, double step);

// Enumerates every active set of min ||z||^2 s.t. A z >= b and keeps the
// best KKT point. Exponential in the row count; rows must not exceed 12.
QPSolution active_set_qp_oracle(const QPInstance& qp);

}  // namespace pinslp
