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

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "dronedet/distributions.hpp"
#include "dronedet/error.hpp"
#include "dronedet/geometry.hpp"

namespace dronedet {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

/// Symbol period T of the transmit waveforms. It only enters through the
/// narrowband condition f_c >> 1/T and the waveform correlation rho, so no
/// computation reads it.
inline constexpr double kSymbolPeriod = 1e-6;  // s

/// Thermal noise floor used when noise is "negligible" (W/Hz).
inline constexpr double kNegligibleNoise = 1e-17;

/// How the interferer waveform correlations rho_i are modelled.
enum class RhoMode {
  fixed_one,  // rho_i = 1
  uniform,    // rho_i ~ U[0, 1]
};

/// Which log-normal shadowing factor enters the interference moment.
enum class ShadowingMoment {
  exact,      // E{e^(2 sigma_s G / b_I)} = e^(2 sigma_s^2 / b_I^2)
  simplified,  // e^(2 sigma_s^2 / b_I)
};

struct NetworkConfig {
  double lambda = 1e-5;        // sensor and interferer density, per m^2
  double p_u = 0.1;            // UE transmit power, W
  double p_d = 0.1;            // drone transmit power, W
  double f_c = 5.8e9;          // carrier, Hz
  double n0 = kNegligibleNoise;  // one-sided noise density N0, W/Hz
  double h = 300.0;            // drone altitude, m
  double rho = 1.0;            // drone/probe waveform correlation
  RhoMode rho_mode = RhoMode::fixed_one;
  ShadowingMoment shadowing = ShadowingMoment::exact;

  /// Power and density may be zero: lambda = 0 removes the interferers,
  /// p_u = 0 silences them and p_d = 0 removes the drone signal.
  void validate() const {
    detail::require(lambda >= 0.0 && std::isfinite(lambda), "network: lambda must be >= 0");
    detail::require(p_u >= 0.0 && std::isfinite(p_u), "network: p_u must be >= 0");
    detail::require(p_d >= 0.0 && std::isfinite(p_d), "network: p_d must be >= 0");
    detail::require(f_c > 0.0, "network: f_c must be positive");
    detail::require(n0 >= 0.0, "network: n0 must be >= 0");
    detail::require(h > 0.0, "network: altitude must be positive");
    detail::require(rho >= 0.0 && rho <= 1.0, "network: rho must lie in [0, 1]");
  }
};

/// Stable-law description of the aggregate interference Y = sqrt(V) G.
struct InterferenceModel {
  double b_i = 2.0;       // amplitude loss exponent gamma_I / 2
  double k_i = 0.0;       // amplitude constant (c / (4 pi f_c))^b_I
  double moment = 0.0;    // E{|U_in|^(2 / b_I)}
  StableParams stable_y;  // law of each I/Q component of Y
  double gamma_g = 0.0;   // per-component variance of Y given V is V * gamma_g

  /// Law of the mixing variable V: S(1/b_I, 1, cos(pi / (2 b_I))).
  StableParams mixing_law() const {
    return {1.0 / b_i, 1.0, std::cos(std::numbers::pi / (2.0 * b_i))};
  }

  bool has_levy_mixing() const { return b_i == 2.0; }
};

/// Free-space amplitude constant k = c / (4 pi f_c).
inline double amplitude_constant(double f_c) {
  detail::require(f_c > 0.0, "amplitude_constant: f_c must be positive");
  return kSpeedOfLight / (4.0 * std::numbers::pi * f_c);
}

/// xi(b_I) = E{|cos Theta|^(2 / b_I)} for Theta uniform on [0, 2 pi),
/// computed as (2/pi) * int_0^(pi/2) sin^p by tanh-sinh quadrature, which
/// absorbs the algebraic endpoint singularity at 0 when p < 1.
inline double xi(double b_i) {
  detail::require(b_i > 0.0, "xi: b_i must be positive");
  const double p = 2.0 / b_i;
  auto f = [p](double t) { return std::pow(std::sin(t), p); };
  boost::math::quadrature::tanh_sinh<double> rule;
  double err = 0.0;
  const double integral = rule.integrate(f, 0.0, std::numbers::pi / 2.0, 1e-12, &err);
  if (!(err <= 1e-8))
    throw QuadratureFailure("xi: quadrature error estimate " + std::to_string(err) + " above 1e-8");
  return integral * 2.0 / std::numbers::pi;
}

/// LePage-series normalisation C_alpha = (1 - alpha) / (Gamma(2 - alpha) cos(pi alpha / 2)),
/// continuous at alpha = 1 where it equals 2 / pi.
inline double stable_normalization(double alpha) {
  detail::require(alpha > 0.0 && alpha < 2.0, "stable_normalization: alpha must lie in (0, 2)");
  if (std::abs(alpha - 1.0) < 1e-9) return 2.0 / std::numbers::pi;
  return (1.0 - alpha) / (std::tgamma(2.0 - alpha) * std::cos(std::numbers::pi * alpha / 2.0));
}

/// Fractional moment E{|U_in|^(2 / b_I)} of one interferer's I (or Q)
/// amplitude: k_I^(2/b) P_u^(1/b) Gamma(1 + 1/b) xi(b) times the shadowing
/// factor, and b / (2 + b) when the correlations are uniform.
inline double interference_moment(const NetworkConfig& cfg, const EnvironmentProfile& env) {
  cfg.validate();
  env.validate();
  const double b = env.b_i();
  const double k_i = std::pow(amplitude_constant(cfg.f_c), b);
  double m = std::pow(k_i, 2.0 / b) * std::pow(cfg.p_u, 1.0 / b) * std::tgamma(1.0 + 1.0 / b) * xi(b);
  if (cfg.rho_mode == RhoMode::uniform) m *= b / (2.0 + b);
  const double s2 = env.sigma_s * env.sigma_s;
  m *= cfg.shadowing == ShadowingMoment::exact ? std::exp(2.0 * s2 / (b * b)) : std::exp(2.0 * s2 / b);
  return m;
}

/// gamma_Y = pi lambda C^-1 E{|U_in|^alpha_Y}, alpha_Y = 2 / b_I, beta_Y = 0,
/// gamma_G = 2 gamma_Y^b_I.
inline InterferenceModel build_interference_model(const NetworkConfig& cfg,
                                                  const EnvironmentProfile& env) {
  InterferenceModel model;
  model.b_i = env.b_i();
  model.k_i = std::pow(amplitude_constant(cfg.f_c), model.b_i);
  model.moment = interference_moment(cfg, env);
  const double alpha_y = 2.0 / model.b_i;
  const double gamma_y = std::numbers::pi * cfg.lambda * model.moment / stable_normalization(alpha_y);
  // A zero dispersion (no interferers) is kept as-is; StableParams::validate
  // is only enforced when the law is actually sampled.
  model.stable_y = {alpha_y, 0.0, gamma_y};
  model.gamma_g = 2.0 * std::pow(gamma_y, model.b_i);
  return model;
}

}  // namespace dronedet
