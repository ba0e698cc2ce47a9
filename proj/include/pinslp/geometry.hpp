// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pinslp Authors
//
// Scenario layout for a multi-waveguide pinching-antenna downlink: waveguides
// run parallel to the x-axis at height d, users sit on the ground plane.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace pinslp {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

struct SystemGeometry {
  double region_side = 20.0;       // side of the square user region [m]
  double height = 5.0;             // waveguide height d [m]
  std::vector<double> waveguide_y; // one y-coordinate per waveguide [m]
  double waveguide_length = 20.0;  // maximum PA coordinate along a waveguide [m]
  double min_spacing = 0.0;        // minimum gap between neighbouring PAs [m]
  int pas_per_waveguide = 1;
  std::vector<Vec3> users;

  int num_waveguides() const { return static_cast<int>(waveguide_y.size()); }
  int num_users() const { return static_cast<int>(users.size()); }

  // Throws std::invalid_argument when any layout invariant is broken.
  void validate() const;
};

// y_n = n * side / (N - 1); a single waveguide is centred.
std::vector<double> uniform_waveguide_y(int num_waveguides, double region_side);

// N x L matrix of PA x-coordinates; entry (n, l) belongs to PA l on waveguide n.
struct PlacementMatrix {
  Eigen::MatrixXd coords;

  PlacementMatrix() = default;
  PlacementMatrix(int num_waveguides, int pas_per_waveguide)
      : coords(Eigen::MatrixXd::Zero(num_waveguides, pas_per_waveguide)) {}
  explicit PlacementMatrix(Eigen::MatrixXd m) : coords(std::move(m)) {}

  int num_waveguides() const { return static_cast<int>(coords.rows()); }
  int pas_per_waveguide() const { return static_cast<int>(coords.cols()); }
  double operator()(int n, int l) const { return coords(n, l); }
  double& operator()(int n, int l) { return coords(n, l); }

  bool operator==(const PlacementMatrix& other) const {
    return coords.rows() == other.coords.rows() && coords.cols() == other.coords.cols() &&
           coords == other.coords;
  }
};

struct MovableRegion {
  double lower = 0.0;
  double upper = 0.0;

  double width() const { return upper - lower; }
  bool contains(double x) const { return x >= lower && x <= upper; }
};

Vec3 pa_position(const SystemGeometry& geom, int n, int l, double x);

double user_pa_distance(const Vec3& user, const Vec3& pa);

// Disjoint initial regions, identical on every waveguide, separated by exactly
// min_spacing and jointly spanning [0, waveguide_length].
std::vector<MovableRegion> initial_regions(const SystemGeometry& geom);

// Region for PA l once PA l-1 has been fixed at prev_opt. The upper end is
// inherited from the initial region; a collapsed interval resolves to the
// single point min(upper, waveguide_length).
MovableRegion updated_region(int l, std::optional<double> prev_opt, const MovableRegion& init,
                             double min_spacing, double waveguide_length);

struct PlacementViolation {
  enum class Kind { kRange, kSpacing, kShape };
  Kind kind;
  int waveguide;
  int pa;
  double magnitude;  // how far the constraint is violated [m]
};

struct PlacementReport {
  std::vector<PlacementViolation> violations;
  bool ok() const { return violations.empty(); }
  std::string describe() const;
};

// Checks 0 <= x <= L^PA and x_{l+1} - x_l >= min_spacing (l < L). `tol`
// absorbs the rounding of lower = prev + spacing.
PlacementReport validate_placement(const SystemGeometry& geom, const PlacementMatrix& placement,
                                   double tol = 1e-12);

}  // namespace pinslp
