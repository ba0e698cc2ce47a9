// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pinslp Authors

#include "pinslp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace pinslp {

void SystemGeometry::validate() const {
  if (!(height > 0.0)) throw std::invalid_argument("geometry: height must be positive");
  if (!(region_side > 0.0)) throw std::invalid_argument("geometry: region side must be positive");
  if (waveguide_y.empty()) throw std::invalid_argument("geometry: no waveguides");
  if (pas_per_waveguide < 1) throw std::invalid_argument("geometry: need at least one PA per waveguide");
  if (min_spacing < 0.0) throw std::invalid_argument("geometry: negative PA spacing");
  if (!(waveguide_length > 0.0)) throw std::invalid_argument("geometry: waveguide length must be positive");
  for (double y : waveguide_y) {
    if (!std::isfinite(y) || y < 0.0 || y > region_side)
      throw std::invalid_argument("geometry: waveguide outside the user region");
  }
  if (waveguide_length < (pas_per_waveguide - 1) * min_spacing)
    throw std::invalid_argument("geometry: waveguide too short for the requested PA spacing");
  for (const auto& u : users) {
    if (!std::isfinite(u.x) || !std::isfinite(u.y) || u.x < 0.0 || u.x > region_side ||
        u.y < 0.0 || u.y > region_side || u.z != 0.0)
      throw std::invalid_argument("geometry: user outside the ground-plane square");
  }
}

std::vector<double> uniform_waveguide_y(int num_waveguides, double region_side) {
  if (num_waveguides < 1) throw std::invalid_argument("uniform_waveguide_y: need N >= 1");
  if (num_waveguides == 1) return {region_side / 2.0};
  std::vector<double> y(num_waveguides);
  for (int n = 0; n < num_waveguides; ++n) y[n] = n * region_side / (num_waveguides - 1);
  return y;
}

Vec3 pa_position(const SystemGeometry& geom, int n, int l, double x) {
  if (n < 0 || n >= geom.num_waveguides()) throw std::out_of_range("pa_position: waveguide index");
  if (l < 0 || l >= geom.pas_per_waveguide) throw std::out_of_range("pa_position: PA index");
  return {x, geom.waveguide_y[n], geom.height};
}

double user_pa_distance(const Vec3& user, const Vec3& pa) {
  const double dx = user.x - pa.x;
  const double dy = user.y - pa.y;
  const double dz = user.z - pa.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

std::vector<MovableRegion> initial_regions(const SystemGeometry& geom) {
  const int L = geom.pas_per_waveguide;
  const double spacing = geom.min_spacing;
  const double init_len = (geom.waveguide_length - (L - 1) * spacing) / L;
  if (init_len < 0.0) throw std::invalid_argument("initial_regions: infeasible PA spacing");
  std::vector<MovableRegion> regions(L);
  for (int i = 0; i < L; ++i) {
    // i is zero-based: PA l = i + 1
    regions[i].lower = i * (init_len + spacing);
    regions[i].upper = (i + 1) * init_len + i * spacing;
  }
  return regions;
}

MovableRegion updated_region(int l, std::optional<double> prev_opt, const MovableRegion& init,
                             double min_spacing, double waveguide_length) {
  MovableRegion r{0.0, std::min(init.upper, waveguide_length)};
  if (l > 0) {
    if (!prev_opt) throw std::invalid_argument("updated_region: previous optimum required for l > 0");
    r.lower = std::clamp(*prev_opt + min_spacing, 0.0, waveguide_length);
  }
  if (r.lower > r.upper) r.lower = r.upper;
  return r;
}

std::string PlacementReport::describe() const {
  if (ok()) return "ok";
  std::ostringstream os;
  for (const auto& v : violations) {
    switch (v.kind) {
      case PlacementViolation::Kind::kRange: os << "range"; break;
      case PlacementViolation::Kind::kSpacing: os << "spacing"; break;
      case PlacementViolation::Kind::kShape: os << "shape"; break;
    }
    os << "(n=" << v.waveguide << ", l=" << v.pa << ", by " << v.magnitude << " m) ";
  }
  return os.str();
}

PlacementReport validate_placement(const SystemGeometry& geom, const PlacementMatrix& placement,
                                   double tol) {
  PlacementReport report;
  if (placement.num_waveguides() != geom.num_waveguides() ||
      placement.pas_per_waveguide() != geom.pas_per_waveguide) {
    report.violations.push_back({PlacementViolation::Kind::kShape, -1, -1, 0.0});
    return report;
  }
  const double slack = tol * std::max(1.0, geom.waveguide_length);
  for (int n = 0; n < placement.num_waveguides(); ++n) {
    for (int l = 0; l < placement.pas_per_waveguide(); ++l) {
      const double x = placement(n, l);
      if (!std::isfinite(x) || x < -slack || x > geom.waveguide_length + slack) {
        const double by = std::isfinite(x) ? (x < 0.0 ? -x : x - geom.waveguide_length)
                                           : std::numeric_limits<double>::infinity();
        report.violations.push_back({PlacementViolation::Kind::kRange, n, l, by});
      }
      if (l + 1 < placement.pas_per_waveguide()) {
        const double gap = placement(n, l + 1) - x;
        if (!(gap >= geom.min_spacing - slack))
          report.violations.push_back(
              {PlacementViolation::Kind::kSpacing, n, l, geom.min_spacing - gap});
      }
    }
  }
  return report;
}

}  // namespace pinslp
