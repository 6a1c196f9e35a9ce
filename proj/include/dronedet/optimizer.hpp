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

/// @file optimizer.hpp
/// Critical density: the lambda maximising P_D_avg with the threshold tied
/// to a false-alarm target.
///
/// For each lambda the threshold is solved from P_FA = alpha_fa, so the
/// constrained problem reduces to a 1-D maximisation of
/// f(lambda) = P_D_avg(lambda, gamma_thr(lambda)). The search runs a
/// log-spaced grid and then golden-section on the cells around the best grid
/// point. Values are compared through the miss probability 1 - P_D_avg,
/// which keeps full relative precision near the peak.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "dronedet/channel.hpp"
#include "dronedet/detector.hpp"
#include "dronedet/error.hpp"
#include "dronedet/geometry.hpp"
#include "dronedet/parallel.hpp"

namespace dronedet {

struct TraceEntry {
  double lambda = 0.0;
  double gamma_thr = 0.0;
  double pd_avg = 0.0;
  double miss = 0.0;  // 1 - pd_avg, evaluated directly
};

struct DensitySearchOptions {
  std::size_t grid_points = 33;  // at least 25
  double rel_tol = 1e-3;         // stop when hi / lo - 1 <= rel_tol
  int max_refinements = 200;
  double flat_tolerance = 1e-7;  // objective spread below this is "flat"
  ThresholdOptions threshold;
};

struct OptimizationResult {
  double lambda_c = 0.0;
  double pd_avg_max = 0.0;
  double miss_min = 1.0;
  double gamma_thr_at_opt = 0.0;
  std::vector<TraceEntry> trace;  // grid evaluations first, then refinement
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  bool boundary_maximum = false;  // best grid point at lo or hi
  bool degenerate_flat = false;   // objective constant over the grid
};

/// f(lambda) with the threshold constraint eliminated. Every lambda uses the
/// same V draws when the method is Monte Carlo.
class DensityObjective {
 public:
  DensityObjective(double alpha_fa, const NetworkConfig& cfg, const EnvironmentProfile& env,
                   const EvalMethod& method, const ThresholdOptions& opt = {})
      : alpha_fa_(alpha_fa), cfg_(cfg), env_(env), opt_(opt),
        mix_(build_interference_model(cfg, env), method) {
    detail::require(alpha_fa > 0.0 && alpha_fa < 1.0, "critical_density: alpha_fa must lie in (0, 1)");
  }

  TraceEntry operator()(double lambda) const {
    NetworkConfig cfg = cfg_;
    cfg.lambda = lambda;
    const auto model = build_interference_model(cfg, env_);
    const auto mix = mix_.with_gamma_g(model.gamma_g);
    const double g = solve_threshold(alpha_fa_, cfg.n0, mix, opt_);
    const double miss = miss_avg(cfg, env_, g, mix);
    return {lambda, g, 1.0 - miss, miss};
  }

 private:
  double alpha_fa_;
  NetworkConfig cfg_;
  EnvironmentProfile env_;
  ThresholdOptions opt_;
  MixingExpectation mix_;
};

inline OptimizationResult critical_density(double alpha_fa, const NetworkConfig& cfg, const EnvironmentProfile& env,
                                           double lambda_lo, double lambda_hi, const EvalMethod& method,
                                           const DensitySearchOptions& opt = {}) {
  detail::require(lambda_lo > 0.0 && lambda_hi > lambda_lo, "critical_density: need 0 < lo < hi");
  detail::require(opt.grid_points >= 25, "critical_density: grid needs at least 25 points");
  detail::require(opt.rel_tol > 0.0, "critical_density: rel_tol must be positive");
  NetworkConfig base = cfg;
  base.lambda = lambda_lo;
  const DensityObjective f(alpha_fa, base, env, method, opt.threshold);

  OptimizationResult res;
  const auto grid = log_grid(lambda_lo, lambda_hi, opt.grid_points);
  res.trace.resize(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { res.trace[i] = f(grid[i]); });

  std::size_t best = 0;
  double worst_miss = res.trace[0].miss;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (res.trace[i].miss < res.trace[best].miss) best = i;
    worst_miss = std::max(worst_miss, res.trace[i].miss);
  }
  auto take = [&res](const TraceEntry& e) {
    res.lambda_c = e.lambda;
    res.pd_avg_max = e.pd_avg;
    res.miss_min = e.miss;
    res.gamma_thr_at_opt = e.gamma_thr;
  };
  take(res.trace[best]);

  if (worst_miss - res.miss_min <= opt.flat_tolerance) {
    res.degenerate_flat = true;
    res.bracket_lo = lambda_lo;
    res.bracket_hi = lambda_hi;
    return res;
  }
  if (best == 0 || best + 1 == grid.size()) {
    res.boundary_maximum = true;
    res.bracket_lo = best == 0 ? grid[0] : grid[best - 1];
    res.bracket_hi = best == 0 ? grid[1] : grid[best];
    return res;
  }

  // Golden-section in u = ln(lambda) on the two cells around the best point.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = std::log(grid[best - 1]);
  double b = std::log(grid[best + 1]);
  auto eval = [&](double u) {
    const TraceEntry e = f(std::exp(u));
    res.trace.push_back(e);
    if (e.miss < res.miss_min) take(e);
    return e.miss;
  };
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = eval(c);
  double fd = eval(d);
  int steps = 0;
  while (std::expm1(b - a) > opt.rel_tol) {
    if (++steps > opt.max_refinements) throw NoConvergence("critical_density: refinement did not converge");
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = eval(d);
    }
  }
  res.bracket_lo = std::exp(a);
  res.bracket_hi = std::exp(b);
  return res;
}

}  // namespace dronedet
