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

/// @file simulator.hpp
/// Signal-level Monte Carlo: builds complex baseband observations from the
/// point process, fading and noise directly, without the stable-law model.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dronedet/channel.hpp"
#include "dronedet/detector.hpp"
#include "dronedet/distributions.hpp"
#include "dronedet/error.hpp"
#include "dronedet/geometry.hpp"
#include "dronedet/parallel.hpp"
#include "dronedet/rng.hpp"
#include "dronedet/stats.hpp"

namespace dronedet {

/// Complex baseband observation R = R_I + j R_Q.
struct IQSample {
  double re = 0.0;
  double im = 0.0;

  double rss() const { return re * re + im * im; }
  IQSample& operator+=(const IQSample& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  friend IQSample operator+(IQSample a, const IQSample& b) { return a += b; }
};

enum class Hypothesis { null, alternative };

/// Diffuse (NLOS) drone component: the exact complex Gaussian limit, or a
/// finite sum of M Rayleigh/uniform-phase rays scaled by 1/sqrt(M).
struct DiffuseMode {
  std::optional<int> multipath;  // empty: exact limit
  static DiffuseMode exact_limit() { return {}; }
  static DiffuseMode finite(int m) { return {m}; }
};

struct TrialConfig {
  std::size_t n_trials = 100000;
  DiffuseMode diffuse = DiffuseMode::exact_limit();
  double r_max = 0.0;                 // 0: default_truncation_radius(lambda)
  Hypothesis hypothesis = Hypothesis::alternative;
  std::optional<double> r0 = 923.0;   // empty: draw the nearest-sensor distance
  std::uint64_t seed = 1;

  void validate() const {
    detail::require(n_trials >= 1, "trial: n_trials must be >= 1");
    detail::require(!diffuse.multipath || *diffuse.multipath >= 1, "trial: M must be >= 1");
    detail::require(r_max >= 0.0, "trial: r_max must be nonnegative");
    detail::require(!r0 || *r0 >= 0.0, "trial: r0 must be nonnegative");
  }

  double truncation(double lambda) const { return r_max > 0.0 ? r_max : default_truncation_radius(lambda); }
};

namespace detail {

inline IQSample polar(double amplitude, double phase) {
  return {amplitude * std::cos(phase), amplitude * std::sin(phase)};
}

/// Slow-varying part of one interferer's amplitude: k_I rho_i e^(sigma_s G) sqrt(P_u) / R^b_I.
inline double interferer_gain(double radius, const NetworkConfig& cfg, const EnvironmentProfile& env,
                              double k_i, RngStream& rng) {
  double gain = k_i * std::sqrt(cfg.p_u) / std::pow(radius, env.b_i());
  if (cfg.rho_mode == RhoMode::uniform) gain *= sample_uniform_corr(rng);
  return gain * sample_lognormal_amp(env.sigma_s, rng);
}

// Stream ids per trial: interference and noise draw from the trial index,
// the drone signal from a disjoint range, so both hypotheses see the same
// interference whichever is simulated first.
inline constexpr std::uint64_t kDroneStream = 1ull << 63;

}  // namespace detail

/// Aggregate interference Y = sum_i U_i / R_i^b_I over one PPP realisation.
inline IQSample simulate_interference(const NetworkConfig& cfg, const EnvironmentProfile& env, double r_max,
                                      RngStream& rng) {
  if (cfg.lambda == 0.0 || cfg.p_u == 0.0) return {};
  const double k_i = std::pow(amplitude_constant(cfg.f_c), env.b_i());
  IQSample y;
  detail::for_each_ppp_radius(cfg.lambda, r_max, rng, [&](double r) {
    const double gain = detail::interferer_gain(r, cfg, env, k_i, rng);
    const double fading = sample_rayleigh_fading(rng);
    const double theta = sample_uniform_phase(rng);  // interferer symbol phase
    const double phi = sample_uniform_phase(rng);    // channel phase
    y += detail::polar(gain * fading, theta + phi);
  });
  return y;
}

inline IQSample simulate_interference(const NetworkConfig& cfg, const EnvironmentProfile& env,
                                      const TrialConfig& trial, RngStream& rng) {
  return simulate_interference(cfg, env, trial.truncation(cfg.lambda), rng);
}

/// Interferer positions, correlations and shadowing frozen; only fading and
/// phases left random. Given the field, Y is complex Gaussian.
struct InterferenceField {
  std::vector<double> gains;  // k_I rho_i e^(sigma_s G_i) sqrt(P_u) / R_i^b_I

  /// Per-component variance sum_i gains_i^2 / 2 of Y given the field.
  double conditional_variance() const {
    double s = 0.0;
    for (double g : gains) s += g * g;
    return 0.5 * s;
  }
};

inline InterferenceField sample_interference_field(const NetworkConfig& cfg, const EnvironmentProfile& env,
                                                   double r_max, RngStream& rng) {
  InterferenceField field;
  if (cfg.lambda == 0.0 || cfg.p_u == 0.0) return field;
  const double k_i = std::pow(amplitude_constant(cfg.f_c), env.b_i());
  detail::for_each_ppp_radius(cfg.lambda, r_max, rng, [&](double r) {
    field.gains.push_back(detail::interferer_gain(r, cfg, env, k_i, rng));
  });
  return field;
}

inline IQSample simulate_interference(const InterferenceField& field, RngStream& rng) {
  IQSample y;
  for (double g : field.gains) {
    const double fading = sample_rayleigh_fading(rng);
    const double theta = sample_uniform_phase(rng);
    const double phi = sample_uniform_phase(rng);
    y += detail::polar(g * fading, theta + phi);
  }
  return y;
}

/// Thermal noise with per-component variance N0/2.
inline IQSample simulate_noise(double n0, RngStream& rng) {
  const double s = std::sqrt(0.5 * n0);
  const double re = s * rng.normal();
  return {re, s * rng.normal()};
}

struct DroneDraw {
  IQSample z;
  bool los = false;
};

/// Drone signal at horizontal distance r0. The propagation state is drawn
/// from P_L(r0) unless `forced` is given.
inline DroneDraw simulate_drone_signal(const NetworkConfig& cfg, const EnvironmentProfile& env, double r0,
                                       const DiffuseMode& diffuse, RngStream& rng,
                                       std::optional<LinkState> forced = std::nullopt) {
  const double d = link_geometry(r0, cfg.h).distance;
  const double amp = amplitude_constant(cfg.f_c) * cfg.rho * std::sqrt(cfg.p_d) / d;
  DroneDraw out;
  out.los = forced ? *forced == LinkState::los : rng.uniform() < los_probability(r0, cfg.h, env);
  const double theta_d = sample_uniform_phase(rng);

  const double ray = amp / std::sqrt(env.eta_nlos);
  if (diffuse.multipath) {
    const int m = *diffuse.multipath;
    const double scale = ray / std::sqrt(static_cast<double>(m));
    for (int i = 0; i < m; ++i) {
      const double fading = sample_rayleigh_fading(rng);
      out.z += detail::polar(scale * fading, sample_uniform_phase(rng) + theta_d);
    }
  } else {
    const double s = ray / std::numbers::sqrt2;
    const double re = s * rng.normal();
    out.z += IQSample{re, s * rng.normal()};
  }
  if (out.los) out.z += detail::polar(amp / std::sqrt(env.eta_los), theta_d);
  return out;
}

inline DroneDraw simulate_drone_signal(const NetworkConfig& cfg, const EnvironmentProfile& env, double r0,
                                       const TrialConfig& trial, RngStream& rng,
                                       std::optional<LinkState> forced = std::nullopt) {
  return simulate_drone_signal(cfg, env, r0, trial.diffuse, rng, forced);
}

/// RSS of both hypotheses for each trial; trial i uses streams keyed by
/// (seed, i) so the output does not depend on the thread count.
struct PairedTrials {
  std::vector<double> rss_null;
  std::vector<double> rss_alt;
  std::vector<double> r0;
  std::vector<std::uint8_t> los;

  std::size_t size() const { return rss_null.size(); }

  /// Columnar text dump: trial, r0_m, los, rss_null, rss_alt.
  void write(std::ostream& os) const {
    os << "# schema: rss_trials/1\ntrial,r0_m,los,rss_null,rss_alt\n";
    os.precision(17);
    for (std::size_t i = 0; i < size(); ++i)
      os << i << ',' << r0[i] << ',' << int(los[i]) << ',' << rss_null[i] << ',' << rss_alt[i] << '\n';
  }
};

inline PairedTrials run_paired_trials(const NetworkConfig& cfg, const EnvironmentProfile& env,
                                      const TrialConfig& trial) {
  cfg.validate();
  env.validate();
  trial.validate();
  const double r_max = cfg.lambda > 0.0 ? trial.truncation(cfg.lambda) : 0.0;
  const std::size_t n = trial.n_trials;
  PairedTrials out;
  out.rss_null.resize(n);
  out.rss_alt.resize(n);
  out.r0.resize(n);
  out.los.resize(n);
  parallel_for(n, [&](std::size_t i) {
    RngStream env_rng(trial.seed, i);
    IQSample base = simulate_interference(cfg, env, r_max, env_rng);
    base += simulate_noise(cfg.n0, env_rng);
    RngStream drone_rng(trial.seed, detail::kDroneStream | i);
    const double r0 = trial.r0 ? *trial.r0 : sample_nearest_distance(cfg.lambda, drone_rng);
    const auto drone = simulate_drone_signal(cfg, env, r0, trial.diffuse, drone_rng);
    out.rss_null[i] = base.rss();
    out.rss_alt[i] = (base + drone.z).rss();
    out.r0[i] = r0;
    out.los[i] = drone.los;
  });
  return out;
}

/// Observation under one hypothesis for trial `index`; identical to the
/// corresponding half of run_paired_trials().
inline IQSample simulate_observation(const NetworkConfig& cfg, const EnvironmentProfile& env,
                                     const TrialConfig& trial, std::size_t index) {
  const double r_max = cfg.lambda > 0.0 ? trial.truncation(cfg.lambda) : 0.0;
  RngStream env_rng(trial.seed, index);
  IQSample r = simulate_interference(cfg, env, r_max, env_rng);
  r += simulate_noise(cfg.n0, env_rng);
  if (trial.hypothesis == Hypothesis::null) return r;
  RngStream drone_rng(trial.seed, detail::kDroneStream | index);
  const double r0 = trial.r0 ? *trial.r0 : sample_nearest_distance(cfg.lambda, drone_rng);
  return r + simulate_drone_signal(cfg, env, r0, trial.diffuse, drone_rng).z;
}

/// Trials needed for a binomial standard error of 0.003 at p = 0.1.
inline constexpr std::size_t kMinRocTrials = 10000;

struct EmpiricalRoc {
  std::vector<DetectorPoint> points;
  std::size_t n_trials = 0;
  std::vector<std::string> warnings;
};

/// Fraction of null and alternative RSS values strictly above each threshold.
inline EmpiricalRoc empirical_roc(const PairedTrials& trials, const std::vector<double>& threshold_grid) {
  detail::require(trials.size() > 0, "empirical_roc: no trials");
  std::vector<double> null = trials.rss_null;
  std::vector<double> alt = trials.rss_alt;
  std::sort(null.begin(), null.end());
  std::sort(alt.begin(), alt.end());
  const double n = static_cast<double>(trials.size());
  auto above = [n](const std::vector<double>& sorted, double g) {
    return static_cast<double>(sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), g)) / n;
  };
  EmpiricalRoc out;
  out.n_trials = trials.size();
  for (double g : threshold_grid) out.points.push_back({g, above(null, g), above(alt, g)});
  if (out.n_trials < kMinRocTrials)
    out.warnings.push_back("insufficient trials: " + std::to_string(out.n_trials) + " < " +
                           std::to_string(kMinRocTrials) + " (binomial s.e. at p = 0.1 exceeds 0.003)");
  return out;
}

inline EmpiricalRoc empirical_roc(const NetworkConfig& cfg, const EnvironmentProfile& env, const TrialConfig& trial,
                                  const std::vector<double>& threshold_grid) {
  return empirical_roc(run_paired_trials(cfg, env, trial), threshold_grid);
}

struct ValidationRow {
  double gamma_thr = 0.0;
  double p_fa_analytic = 0.0;
  double p_fa_empirical = 0.0;
  double p_d_analytic = 0.0;
  double p_d_empirical = 0.0;
  stats::Interval p_fa_ci;
  stats::Interval p_d_ci;
  double deviation = 0.0;  // max of |delta p_fa| and |delta p_d|
  bool pass = true;
};

struct ValidationReport {
  std::vector<ValidationRow> rows;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  std::vector<std::string> warnings;
};

/// Compares analytic and empirical ROC points on a common threshold grid.
/// `n_trials` sets the 95 % Wilson intervals of the empirical values.
inline ValidationReport validation_report(const std::vector<DetectorPoint>& analytic,
                                          const std::vector<DetectorPoint>& empirical, double tolerance,
                                          std::size_t n_trials) {
  if (analytic.size() != empirical.size())
    throw GridMismatch("validation_report: " + std::to_string(analytic.size()) + " analytic vs " +
                       std::to_string(empirical.size()) + " empirical points");
  ValidationReport rep;
  rep.tolerance = tolerance;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const auto& a = analytic[i];
    const auto& e = empirical[i];
    const double scale = std::max(std::abs(a.gamma_thr), std::abs(e.gamma_thr));
    if (std::abs(a.gamma_thr - e.gamma_thr) > 1e-9 * scale)
      throw GridMismatch("validation_report: thresholds differ at point " + std::to_string(i));
    ValidationRow row{a.gamma_thr, a.p_fa, e.p_fa, a.p_d, e.p_d,
                      stats::wilson_interval(e.p_fa, n_trials), stats::wilson_interval(e.p_d, n_trials)};
    row.deviation = std::max(std::abs(a.p_fa - e.p_fa), std::abs(a.p_d - e.p_d));
    row.pass = row.deviation <= tolerance;
    rep.max_deviation = std::max(rep.max_deviation, row.deviation);
    rep.pass = rep.pass && row.pass;
    rep.rows.push_back(row);
  }
  if (n_trials < kMinRocTrials) rep.warnings.push_back("insufficient trials for the requested tolerance");
  return rep;
}

}  // namespace dronedet
