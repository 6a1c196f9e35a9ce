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

/// @file detector.hpp
/// Analytic false-alarm and detection probabilities of the RSS detector.
///
/// Conditioned on the mixing variable V the received I/Q components are
/// Gaussian with per-component variance
///   sigma0^2 = V gamma_G + N0/2                      (no drone)
///   sigma1^2 = k^2 rho^2 P_d / (2 eta_N d^2) + sigma0^2  (drone present)
/// and, in the LOS state, mean power k^2 rho^2 P_d / (eta_L d^2). The RSS
/// CCDFs are therefore exponential (null and NLOS) or Marcum-Q (LOS); the
/// unconditional probabilities are expectations of those over V.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "dronedet/channel.hpp"
#include "dronedet/distributions.hpp"
#include "dronedet/error.hpp"
#include "dronedet/geometry.hpp"
#include "dronedet/marcum.hpp"
#include "dronedet/parallel.hpp"
#include "dronedet/quadrature.hpp"

namespace dronedet {

/// One point of a ROC curve.
struct DetectorPoint {
  double gamma_thr = 0.0;
  double p_fa = 0.0;
  double p_d = 0.0;
};

/// How expectations over the mixing variable V are evaluated.
struct EvalMethod {
  enum class Kind {
    levy_quadrature,    // closed-form Lévy density; b_I = 2 only
    stable_montecarlo,  // average over a fixed set of stable draws
  };
  Kind kind = Kind::levy_quadrature;
  std::size_t samples = 100000;
  std::uint64_t seed = 1;

  static EvalMethod levy_quadrature() { return {}; }
  static EvalMethod stable_montecarlo(std::size_t samples, std::uint64_t seed) {
    return {Kind::stable_montecarlo, samples, seed};
  }
};

enum class LinkState { los, nlos };

/// E_V[g(V)] for one interference model.
///
/// Lévy quadrature substitutes v = 1 / (2 z^2), which turns the Lévy
/// density into the half-normal weight sqrt(2/pi) exp(-z^2/2) on z > 0 and
/// removes both the essential singularity at v = 0 and the v^(-3/2) tail.
/// The Monte Carlo variant draws its V samples once at construction, so every
/// expectation taken through the same object uses common random numbers.
class MixingExpectation {
 public:
  MixingExpectation(const InterferenceModel& model, const EvalMethod& method)
      : kind_(method.kind), gamma_g_(model.gamma_g) {
    if (kind_ == EvalMethod::Kind::levy_quadrature) {
      if (!model.has_levy_mixing())
        throw MethodMismatch("levy-quadrature requires b_I = 2, got b_I = " +
                             std::to_string(model.b_i));
      return;
    }
    detail::require(method.samples > 0, "stable-montecarlo needs at least one sample");
    const StableParams law = model.mixing_law();
    auto draws = std::make_shared<std::vector<double>>(method.samples);
    // Block-wise streams keep the draw set independent of thread count.
    constexpr std::size_t kBlock = 4096;
    const std::size_t blocks = (method.samples + kBlock - 1) / kBlock;
    parallel_for(blocks, [&](std::size_t blk) {
      RngStream rng(method.seed, 0x4d49580000000000ull + blk);
      const std::size_t hi = std::min(method.samples, (blk + 1) * kBlock);
      for (std::size_t i = blk * kBlock; i < hi; ++i) (*draws)[i] = sample_stable(law, rng);
    });
    samples_ = std::move(draws);
  }

  EvalMethod::Kind kind() const { return kind_; }
  double gamma_g() const { return gamma_g_; }

  /// Same V law and, for Monte Carlo, the same draws with another gamma_G.
  /// The law of V depends on b_I only, so models that differ in density can
  /// share draws.
  MixingExpectation with_gamma_g(double gamma_g) const {
    MixingExpectation out = *this;
    out.gamma_g_ = gamma_g;
    return out;
  }

  /// `v_scales` lists values of V around which g changes; they place the
  /// quadrature break points and are ignored by the Monte Carlo variant.
  template <typename G>
  double operator()(G&& g, std::initializer_list<double> v_scales = {},
                    const quad::Tolerance& tol = {1e-13, 1e-11, 400}) const {
    if (gamma_g_ == 0.0) return g(1.0);  // V multiplies a zero dispersion
    if (kind_ == EvalMethod::Kind::stable_montecarlo) {
      double acc = 0.0;
      for (double v : *samples_) acc += g(v);
      return acc / static_cast<double>(samples_->size());
    }
    constexpr double kZMax = 12.0;  // half-normal mass beyond is ~1e-33
    std::vector<double> breaks{0.0, 0.5, 1.0, 2.0, 3.0, 4.5, 6.5, kZMax};
    for (double v : v_scales) {
      if (!(v > 0.0) || !std::isfinite(v)) continue;
      const double z = 1.0 / std::sqrt(2.0 * v);
      for (double f : {0.125, 0.5, 2.0, 8.0}) {
        const double zz = z * f;
        if (zz > 1e-12 && zz < kZMax) breaks.push_back(zz);
      }
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    const double w0 = std::sqrt(2.0 / std::numbers::pi);
    auto integrand = [&](double z) {
      if (z <= 0.0) return w0 * g(std::numeric_limits<double>::infinity());
      return w0 * std::exp(-0.5 * z * z) * g(0.5 / (z * z));
    };
    return quad::integrate_checked(integrand, breaks, tol, 1e-6);
  }

 private:
  EvalMethod::Kind kind_;
  double gamma_g_;
  std::shared_ptr<const std::vector<double>> samples_;
};

// --- conditional RSS laws --------------------------------------------------

/// P(R_S > rs) for zero-mean complex Gaussian R with per-component variance s2.
inline double ccdf_central(double rs, double s2) {
  if (rs <= 0.0) return 1.0;
  if (!(s2 > 0.0)) return 0.0;
  return std::exp(-rs / (2.0 * s2));
}

/// P(R_S > rs) for R with mean power mu2 = |E R|^2 and per-component variance s2.
inline double ccdf_noncentral(double rs, double mu2, double s2) {
  if (rs <= 0.0) return 1.0;
  if (!(s2 > 0.0)) return mu2 > rs ? 1.0 : 0.0;
  return marcum_q1(std::sqrt(mu2 / s2), std::sqrt(rs / s2));
}

/// P(R_S <= rs), the complement of ccdf_central() without cancellation.
inline double cdf_central(double rs, double s2) {
  if (rs <= 0.0) return 0.0;
  if (!(s2 > 0.0)) return 1.0;
  return -std::expm1(-rs / (2.0 * s2));
}

/// P(R_S <= rs), the complement of ccdf_noncentral() without cancellation.
inline double cdf_noncentral(double rs, double mu2, double s2) {
  if (rs <= 0.0) return 0.0;
  if (!(s2 > 0.0)) return mu2 > rs ? 0.0 : 1.0;
  return marcum_q1_complement(std::sqrt(mu2 / s2), std::sqrt(rs / s2));
}

/// Received drone powers at horizontal distance r0.
struct SignalPowers {
  double los_probability = 0.0;
  double distance = 0.0;
  double mean_power = 0.0;     // k^2 rho^2 P_d / (eta_L d^2), LOS state
  double diffuse_var = 0.0;    // k^2 rho^2 P_d / (2 eta_N d^2), per component
};

inline SignalPowers signal_powers(double r0, const NetworkConfig& cfg, const EnvironmentProfile& env) {
  const auto geo = link_geometry(r0, cfg.h);
  const double k = amplitude_constant(cfg.f_c);
  const double p = k * k * cfg.rho * cfg.rho * cfg.p_d / (geo.distance * geo.distance);
  return {los_probability(r0, cfg.h, env), geo.distance, p / env.eta_los, p / (2.0 * env.eta_nlos)};
}

// --- false alarm -----------------------------------------------------------

/// P_FA = E_V[exp(-gamma_thr / (2 (V gamma_G + N0/2)))].
inline double pfa(double gamma_thr, double n0, const MixingExpectation& mix) {
  detail::require(gamma_thr >= 0.0, "pfa: threshold must be nonnegative");
  if (gamma_thr == 0.0) return 1.0;
  const double gg = mix.gamma_g();
  const double noise = 0.5 * n0;
  auto g = [&](double v) { return ccdf_central(gamma_thr, v * gg + noise); };
  return mix(g, {noise / gg, gamma_thr / gg});
}

inline double pfa(double gamma_thr, const InterferenceModel& model, double n0, const EvalMethod& method) {
  return pfa(gamma_thr, n0, MixingExpectation(model, method));
}

/// Interference-free false-alarm probability exp(-gamma_thr / N0).
inline double pfa_noise_only(double gamma_thr, double n0) { return ccdf_central(gamma_thr, 0.5 * n0); }

struct ThresholdOptions {
  double tolerance = 1e-6;   // |pfa(gamma) - alpha| target
  int max_expansions = 400;  // bracket growth steps (factor 4 each)
  int max_bisections = 200;
};

/// Inverts P_FA(gamma_thr) = alpha_fa by bracketing and log-space bisection.
inline double solve_threshold(double alpha_fa, double n0, const MixingExpectation& mix,
                              const ThresholdOptions& opt = {}) {
  detail::require(alpha_fa > 0.0 && alpha_fa < 1.0, "solve_threshold: alpha_fa must lie in (0, 1)");
  const double gg = mix.gamma_g();
  if (gg == 0.0) {
    if (n0 == 0.0) throw NoConvergence("solve_threshold: no interference and no noise");
    return n0 * std::log(1.0 / alpha_fa);
  }
  auto f = [&](double g) { return pfa(g, n0, mix) - alpha_fa; };

  // Bracket: f(lo) >= 0 >= f(hi).
  double hi = gg + 0.5 * n0;
  double lo = hi;
  int steps = 0;
  if (f(hi) > 0.0) {
    while (f(hi) > 0.0) {
      lo = hi;
      hi *= 4.0;
      if (++steps > opt.max_expansions)
        throw NoConvergence("solve_threshold: bracket expansion exceeded bound");
    }
  } else {
    while (f(lo) < 0.0) {
      hi = lo;
      lo *= 0.25;
      if (++steps > opt.max_expansions || lo == 0.0)
        throw NoConvergence("solve_threshold: bracket contraction exceeded bound");
    }
  }

  double best = lo;
  double best_err = std::abs(f(lo));
  for (int i = 0; i < opt.max_bisections; ++i) {
    const double mid = std::sqrt(lo * hi);
    const double fm = f(mid);
    if (std::abs(fm) < best_err) {
      best = mid;
      best_err = std::abs(fm);
    }
    if (best_err <= 0.01 * opt.tolerance || hi / lo - 1.0 < 1e-15) break;
    (fm > 0.0 ? lo : hi) = mid;
  }
  if (best_err > opt.tolerance)
    throw NoConvergence("solve_threshold: residual " + std::to_string(best_err) +
                        " above tolerance for alpha_fa = " + std::to_string(alpha_fa));
  return best;
}

inline double solve_threshold(double alpha_fa, const InterferenceModel& model, double n0,
                              const EvalMethod& method) {
  return solve_threshold(alpha_fa, n0, MixingExpectation(model, method));
}

// --- detection -------------------------------------------------------------

/// Miss probability 1 - P_D with an arbitrary LOS weight p_los:
///   E_V[p_los (1 - Q_1(a, b)) + (1 - p_los) (1 - exp(-gamma_thr / (2 sigma1^2)))]
/// with a = sqrt(mean_power) / sigma1 and b = sqrt(gamma_thr) / sigma1.
/// Detection probabilities close to one are only resolvable through this
/// complement, which the density optimiser relies on.
inline double miss_weighted(double p_los, double r0, double gamma_thr, const NetworkConfig& cfg,
                            const EnvironmentProfile& env, const MixingExpectation& mix) {
  detail::require(gamma_thr >= 0.0, "pd: threshold must be nonnegative");
  detail::require(p_los >= 0.0 && p_los <= 1.0, "pd: LOS weight must lie in [0, 1]");
  if (gamma_thr == 0.0) return 0.0;
  const auto sp = signal_powers(r0, cfg, env);
  const double gg = mix.gamma_g();
  const double base = sp.diffuse_var + 0.5 * cfg.n0;
  auto g = [&](double v) {
    const double s1 = base + v * gg;
    double out = 0.0;
    if (p_los > 0.0) out += p_los * cdf_noncentral(gamma_thr, sp.mean_power, s1);
    if (p_los < 1.0) out += (1.0 - p_los) * cdf_central(gamma_thr, s1);
    return out;
  };
  return mix(g, {base / gg, gamma_thr / gg, sp.mean_power / gg}, {1e-300, 1e-9, 400});
}

inline double pd_weighted(double p_los, double r0, double gamma_thr, const NetworkConfig& cfg,
                          const EnvironmentProfile& env, const MixingExpectation& mix) {
  return 1.0 - miss_weighted(p_los, r0, gamma_thr, cfg, env, mix);
}

/// Detection probability in a fixed propagation state (P_L forced to 1 or 0).
inline double pd_given_state(LinkState state, double r0, double gamma_thr, const NetworkConfig& cfg,
                             const EnvironmentProfile& env, const MixingExpectation& mix) {
  return pd_weighted(state == LinkState::los ? 1.0 : 0.0, r0, gamma_thr, cfg, env, mix);
}

/// Single-sensor detection probability at horizontal distance r0.
inline double pd_single(double r0, double gamma_thr, const NetworkConfig& cfg,
                        const EnvironmentProfile& env, const MixingExpectation& mix) {
  return pd_weighted(los_probability(r0, cfg.h, env), r0, gamma_thr, cfg, env, mix);
}

inline double pd_single(double r0, double gamma_thr, const NetworkConfig& cfg, const EnvironmentProfile& env,
                        const InterferenceModel& model, const EvalMethod& method) {
  return pd_single(r0, gamma_thr, cfg, env, MixingExpectation(model, method));
}

/// Integrates f(r0) against the nearest-sensor density 2 pi lambda r0 exp(-lambda pi r0^2).
///
/// With t = lambda pi r0^2 the density becomes e^-t on t >= 0; the range is
/// cut at t = ln(1e10), where the remaining tail mass is 1e-10.
template <typename F>
double average_over_nearest_sensor(double lambda, F&& f, const quad::Tolerance& tol = {1e-9, 1e-10, 300}) {
  detail::require(lambda > 0.0, "average over nearest sensor requires lambda > 0");
  const double t_max = std::log(1e10);
  const double scale = std::numbers::pi * lambda;
  auto integrand = [&](double t) { return std::exp(-t) * f(std::sqrt(t / scale)); };
  return quad::integrate_checked(integrand, {0.0, 0.1, 0.5, 1.5, 4.0, 9.0, t_max}, tol, 1e-4);
}

/// Network-average miss probability 1 - P_D_avg.
inline double miss_avg(const NetworkConfig& cfg, const EnvironmentProfile& env, double gamma_thr,
                       const MixingExpectation& mix) {
  return average_over_nearest_sensor(
      cfg.lambda,
      [&](double r0) { return miss_weighted(los_probability(r0, cfg.h, env), r0, gamma_thr, cfg, env, mix); },
      {1e-300, 1e-8, 300});
}

/// Network-average detection probability over the nearest-sensor distance.
inline double pd_avg(const NetworkConfig& cfg, const EnvironmentProfile& env, double gamma_thr,
                     const MixingExpectation& mix) {
  return 1.0 - miss_avg(cfg, env, gamma_thr, mix);
}

inline double pd_avg(const NetworkConfig& cfg, const EnvironmentProfile& env, const InterferenceModel& model,
                     double gamma_thr, const EvalMethod& method) {
  return pd_avg(cfg, env, gamma_thr, MixingExpectation(model, method));
}

// --- ROC -------------------------------------------------------------------

/// Single sensor at a known horizontal distance, or the network average.
struct RocMode {
  std::optional<double> r0;
  static RocMode single(double r0) { return {r0}; }
  static RocMode network_average() { return {std::nullopt}; }
};

struct RocCurve {
  std::vector<DetectorPoint> points;
  std::vector<std::string> failures;  // one message per grid value that failed
};

/// Solves the threshold for each target false-alarm rate and evaluates P_D.
/// Points that fail are reported in `failures`; the rest are returned sorted
/// by p_fa.
inline RocCurve roc_curve(const RocMode& mode, const NetworkConfig& cfg, const EnvironmentProfile& env,
                          const MixingExpectation& mix, const std::vector<double>& alpha_fa_grid) {
  detail::require(!alpha_fa_grid.empty(), "roc_curve: empty false-alarm grid");
  for (std::size_t i = 0; i < alpha_fa_grid.size(); ++i) {
    detail::require(alpha_fa_grid[i] > 0.0 && alpha_fa_grid[i] < 1.0, "roc_curve: grid values must lie in (0, 1)");
    if (i) detail::require(alpha_fa_grid[i] > alpha_fa_grid[i - 1], "roc_curve: grid must be strictly increasing");
  }
  const std::size_t n = alpha_fa_grid.size();
  std::vector<std::optional<DetectorPoint>> slots(n);
  std::vector<std::string> errors(n);
  parallel_for(n, [&](std::size_t i) {
    try {
      const double g = solve_threshold(alpha_fa_grid[i], cfg.n0, mix);
      const double p_fa = pfa(g, cfg.n0, mix);
      const double p_d = mode.r0 ? pd_single(*mode.r0, g, cfg, env, mix) : pd_avg(cfg, env, g, mix);
      slots[i] = DetectorPoint{g, p_fa, p_d};
    } catch (const Error& e) {
      errors[i] = "alpha_fa=" + std::to_string(alpha_fa_grid[i]) + ": " + e.what();
    }
  });
  RocCurve out;
  for (std::size_t i = 0; i < n; ++i) {
    if (slots[i]) out.points.push_back(*slots[i]);
    else out.failures.push_back(errors[i]);
  }
  std::sort(out.points.begin(), out.points.end(),
            [](const DetectorPoint& a, const DetectorPoint& b) { return a.p_fa < b.p_fa; });
  return out;
}

inline RocCurve roc_curve(const RocMode& mode, const NetworkConfig& cfg, const EnvironmentProfile& env,
                          const InterferenceModel& model, const std::vector<double>& alpha_fa_grid,
                          const EvalMethod& method) {
  return roc_curve(mode, cfg, env, MixingExpectation(model, method), alpha_fa_grid);
}

/// `count` log-spaced values from lo to hi inclusive.
inline std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  detail::require(lo > 0.0 && hi > lo && count >= 2, "log_grid: need 0 < lo < hi and count >= 2");
  std::vector<double> out(count);
  const double step = std::log(hi / lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) out[i] = lo * std::exp(step * static_cast<double>(i));
  out.back() = hi;
  return out;
}

}  // namespace dronedet
