// SPDX-License-Identifier: Apache-2.0
//
// dronedet: RSS-based drone detection in a Poisson field of interferers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "dronedet/error.hpp"
#include "dronedet/rng.hpp"

namespace dronedet {

/// Propagation environment: LOS sigmoid (a, b), excess losses and the
/// interference path-loss exponent.
///
/// Excess losses are linear power ratios. The presets use the usual A2G
/// constants for suburban and urban areas.
struct EnvironmentProfile {
  double a = 4.88;
  double b = 0.43;
  double eta_los = 1.0;
  double eta_nlos = 10.0;
  double gamma_i = 4.0;
  double sigma_s = 0.0;
  std::string label = "custom";

  /// Amplitude loss exponent b_I = gamma_I / 2.
  double b_i() const { return gamma_i / 2.0; }

  void validate() const {
    detail::require(a > 0.0 && b > 0.0, "environment: a and b must be positive");
    detail::require(eta_los >= 1.0, "environment: eta_los must be >= 1");
    detail::require(eta_nlos > eta_los, "environment: eta_nlos must exceed eta_los");
    detail::require(gamma_i >= 2.13 && gamma_i <= 4.89,
                    "environment: gamma_i must lie in [2.13, 4.89]");
    detail::require(sigma_s >= 0.0, "environment: sigma_s must be nonnegative");
  }

  static EnvironmentProfile suburban(double gamma_i = 4.0) {
    return {4.88, 0.43, std::pow(10.0, 0.01), std::pow(10.0, 2.1), gamma_i, 0.0, "suburban"};
  }
  static EnvironmentProfile urban(double gamma_i = 4.0) {
    return {9.61, 0.16, std::pow(10.0, 0.1), std::pow(10.0, 2.0), gamma_i, 0.0, "urban"};
  }
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  double radius() const { return std::hypot(x, y); }
};

/// Realisation of a homogeneous PPP restricted to a disk around the origin.
/// Points are ordered by ascending distance to the origin.
struct PointField {
  std::vector<Point2> points;
  double radius = 0.0;
  double density = 0.0;
};

/// Default simulation truncation radius 30 / sqrt(pi lambda); the expected
/// number of points is 900 and the void probability beyond it is e^-900.
inline double default_truncation_radius(double lambda) {
  detail::require(lambda > 0.0, "density must be positive");
  return 30.0 / std::sqrt(std::numbers::pi * lambda);
}

namespace detail {

/// Calls visit(r) for every point radius of a PPP of density `lambda` on the
/// disk of radius `r_max`, in ascending order. Uses the arrival construction
/// pi lambda R_i^2 = E_1 + ... + E_i with unit exponentials, which gives an
/// exactly Poisson(lambda pi r_max^2) count with uniform locations.
template <typename Visitor>
void for_each_ppp_radius(double lambda, double r_max, RngStream& rng, Visitor&& visit) {
  const double scale = std::numbers::pi * lambda;
  const double limit = scale * r_max * r_max;
  double arrival = rng.exponential();
  while (arrival <= limit) {
    visit(std::sqrt(arrival / scale));
    arrival += rng.exponential();
  }
}

}  // namespace detail

inline PointField sample_ppp_disk(double lambda, double r_max, RngStream& rng) {
  detail::require(lambda > 0.0 && std::isfinite(lambda), "sample_ppp_disk: lambda must be positive");
  detail::require(r_max > 0.0 && std::isfinite(r_max), "sample_ppp_disk: r_max must be positive");
  PointField field;
  field.radius = r_max;
  field.density = lambda;
  detail::for_each_ppp_radius(lambda, r_max, rng, [&](double r) {
    const double angle = 2.0 * std::numbers::pi * rng.uniform();
    field.points.push_back({r * std::cos(angle), r * std::sin(angle)});
  });
  return field;
}

/// Density 2 pi lambda r0 exp(-lambda pi r0^2) of the nearest-sensor distance.
inline double nearest_neighbor_pdf(double r0, double lambda) {
  if (r0 < 0.0) throw DomainError("nearest_neighbor_pdf requires r0 >= 0");
  detail::require(lambda > 0.0, "nearest_neighbor_pdf: lambda must be positive");
  return 2.0 * std::numbers::pi * lambda * r0 * std::exp(-lambda * std::numbers::pi * r0 * r0);
}

inline double nearest_neighbor_cdf(double r0, double lambda) {
  if (r0 <= 0.0) return 0.0;
  return -std::expm1(-lambda * std::numbers::pi * r0 * r0);
}

/// Inverse-CDF draw r0 = sqrt(-ln u / (pi lambda)).
inline double sample_nearest_distance(double lambda, RngStream& rng) {
  detail::require(lambda > 0.0, "sample_nearest_distance: lambda must be positive");
  return std::sqrt(-std::log(rng.uniform_open_low()) / (std::numbers::pi * lambda));
}

struct LinkGeometry {
  double distance = 0.0;       // metres
  double elevation_deg = 0.0;  // degrees above the horizon
};

inline LinkGeometry link_geometry(double r0, double h) {
  detail::require(r0 >= 0.0, "link_geometry: r0 must be nonnegative");
  detail::require(h > 0.0, "link_geometry: altitude must be positive");
  const double theta = r0 == 0.0 ? 90.0 : (180.0 / std::numbers::pi) * std::atan(h / r0);
  return {std::hypot(r0, h), theta};
}

/// LOS probability 1 / (1 + a exp(-b (theta - a))) of the A2G link.
inline double los_probability(double r0, double h, const EnvironmentProfile& env) {
  const double theta = link_geometry(r0, h).elevation_deg;
  return 1.0 / (1.0 + env.a * std::exp(-env.b * (theta - env.a)));
}

inline double nlos_probability(double r0, double h, const EnvironmentProfile& env) {
  return 1.0 - los_probability(r0, h, env);
}

}  // namespace dronedet
