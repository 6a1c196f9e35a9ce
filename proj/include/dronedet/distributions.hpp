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

#include "dronedet/error.hpp"
#include "dronedet/rng.hpp"

namespace dronedet {

/// Parameters of a stable law S(alpha, beta, gamma).
///
/// `gamma` is the dispersion, i.e. the characteristic function is
///   exp(-gamma |t|^alpha [1 - j beta sign(t) tan(pi alpha / 2)])   (alpha != 1)
/// so the conventional scale is sigma = gamma^(1/alpha). With alpha = 2 and
/// beta = 0 the law is Gaussian with variance 2 gamma.
struct StableParams {
  double alpha = 2.0;
  double beta = 0.0;
  double gamma = 0.5;

  double scale() const { return std::pow(gamma, 1.0 / alpha); }

  void validate() const {
    detail::require(alpha > 0.0 && alpha <= 2.0, "stable alpha must lie in (0, 2]");
    detail::require(beta >= -1.0 && beta <= 1.0, "stable beta must lie in [-1, 1]");
    detail::require(gamma > 0.0 && std::isfinite(gamma), "stable gamma must be positive");
  }
};

/// The totally skewed alpha = 1/2 law whose density is levy_pdf().
/// Its dispersion cos(pi/4) corresponds to the classical Lévy scale 1/2.
inline StableParams levy_params() {
  return StableParams{0.5, 1.0, std::cos(std::numbers::pi / 4.0)};
}

/// Chambers-Mandelbrot-Stuck sampler in the characteristic-function
/// convention documented on StableParams.
inline double sample_stable(const StableParams& p, RngStream& rng) {
  p.validate();
  constexpr double half_pi = std::numbers::pi / 2.0;
  const double u = std::numbers::pi * (rng.uniform() - 0.5);  // U(-pi/2, pi/2)
  const double w = rng.exponential();
  const double sigma = p.scale();

  if (p.alpha == 1.0) {
    // alpha = 1 branch; the detector never reaches it but it is kept complete.
    const double lead = (half_pi + p.beta * u) * std::tan(u);
    const double tail = p.beta * std::log((half_pi * w * std::cos(u)) / (half_pi + p.beta * u));
    const double x = (lead - tail) / half_pi;
    return sigma * x + (2.0 / std::numbers::pi) * p.beta * sigma * std::log(sigma);
  }

  const double zeta = p.beta * std::tan(half_pi * p.alpha);
  const double shift = std::atan(zeta) / p.alpha;
  const double stretch = std::pow(1.0 + zeta * zeta, 1.0 / (2.0 * p.alpha));
  const double au = p.alpha * (u + shift);
  const double x = stretch * std::sin(au) / std::pow(std::cos(u), 1.0 / p.alpha) *
                   std::pow(std::cos(u - au) / w, (1.0 - p.alpha) / p.alpha);
  return sigma * x;
}

/// Lévy density v^(-3/2) / (2 sqrt(pi)) exp(-1/(4v)).
inline double levy_pdf(double v) {
  if (!(v > 0.0)) throw DomainError("levy_pdf requires v > 0, got " + std::to_string(v));
  return std::exp(-0.25 / v - 1.5 * std::log(v)) / (2.0 * std::sqrt(std::numbers::pi));
}

/// Lévy CDF, erfc(1 / (2 sqrt(v))); zero for v <= 0.
inline double levy_cdf(double v) {
  if (v <= 0.0) return 0.0;
  return std::erfc(0.5 / std::sqrt(v));
}

/// Lévy variate as 1 / (2 N^2), N standard normal.
inline double sample_levy(RngStream& rng) {
  double n = 0.0;
  while (n == 0.0) n = rng.normal();
  return 0.5 / (n * n);
}

/// Rayleigh amplitude with sigma^2 = 1/2, so E{alpha^2} = 1.
inline double sample_rayleigh_fading(RngStream& rng) {
  return std::sqrt(-std::log(rng.uniform_open_low()));
}

/// Phase uniform on [0, 2 pi).
inline double sample_uniform_phase(RngStream& rng) {
  return 2.0 * std::numbers::pi * rng.uniform();
}

/// Log-normal amplitude loss e^(sigma_s G).
inline double sample_lognormal_amp(double sigma_s, RngStream& rng) {
  detail::require(sigma_s >= 0.0, "sigma_s must be nonnegative");
  if (sigma_s == 0.0) return 1.0;
  return std::exp(sigma_s * rng.normal());
}

/// Waveform cross-correlation, uniform on [0, 1].
inline double sample_uniform_corr(RngStream& rng) { return rng.uniform(); }

}  // namespace dronedet
