// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pinslp Authors

#pragma once

#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Core>

namespace pinslp {

using cdouble = std::complex<double>;

// Unit-modulus M-PSK symbols, one per user. Points are e^{j(2m+1)pi/M}.
struct SymbolVector {
  Eigen::VectorXcd s;
  int order = 4;

  int size() const { return static_cast<int>(s.size()); }
  cdouble operator[](int k) const { return s(k); }
};

cdouble psk_point(int index, int order);

SymbolVector draw_psk_symbols(int num_users, int order, std::mt19937_64& rng);

// N x K matrix whose column k is the beamformer for user k.
struct BeamMatrix {
  Eigen::MatrixXcd w;

  int num_waveguides() const { return static_cast<int>(w.rows()); }
  int num_users() const { return static_cast<int>(w.cols()); }
};

inline double dbm_to_watts(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }
inline double watts_to_dbm(double watts) { return 10.0 * std::log10(watts * 1e3); }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace pinslp
