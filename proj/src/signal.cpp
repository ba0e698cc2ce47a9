// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pinslp Authors

#include "pinslp/signal.hpp"

#include <numbers>
#include <stdexcept>

namespace pinslp {

cdouble psk_point(int index, int order) {
  if (order < 2) throw std::invalid_argument("psk_point: order must be >= 2");
  const double angle = (2.0 * (index % order) + 1.0) * std::numbers::pi / order;
  return std::polar(1.0, angle);
}

SymbolVector draw_psk_symbols(int num_users, int order, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, order - 1);
  SymbolVector sv;
  sv.order = order;
  sv.s.resize(num_users);
  for (int k = 0; k < num_users; ++k) sv.s(k) = psk_point(pick(rng), order);
  return sv;
}

}  // namespace pinslp
