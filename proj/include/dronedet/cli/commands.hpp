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

/// @file commands.hpp
/// The CLI verbs. Each command is a function of the run configuration that
/// writes its files under output_dir and returns an exit status.

#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "dronedet/channel.hpp"
#include "dronedet/cli/config.hpp"
#include "dronedet/cli/output.hpp"
#include "dronedet/detector.hpp"
#include "dronedet/optimizer.hpp"
#include "dronedet/parallel.hpp"
#include "dronedet/simulator.hpp"

namespace dronedet::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitNumerical = 2,
  kExitValidation = 3,
};

struct Outcome {
  int exit_code = kExitOk;
  std::vector<std::string> files;
};

namespace detail {

inline std::string label_of(const EnvironmentProfile& env) { return env.label; }

inline double r0_for(const RocSection& roc, double h) {
  if (roc.elevation_deg) return h / std::tan(*roc.elevation_deg * std::numbers::pi / 180.0);
  return *roc.r0_m;
}

inline std::string curve_name(const EnvironmentProfile& env, double lambda, double h, double gamma_i) {
  std::ostringstream s;
  s << env.label << " lambda=" << fmt(lambda) << " h=" << fmt(h) << " gI=" << fmt(gamma_i);
  return s.str();
}

}  // namespace detail

/// ROC curves over environments x densities x altitudes.
inline Outcome cmd_roc(const RunConfig& rc, std::ostream& log) {
  const auto& roc = rc.roc;
  dronedet::detail::require(!roc.p_fa.empty(), "roc: empty false-alarm grid");
  if (!roc.network_average && !roc.elevation_deg && !roc.r0_m)
    throw ConfigError("roc: set r0_m, elevation_deg or network_average");
  const std::vector<double> densities = roc.densities.empty() ? std::vector{rc.network.lambda} : roc.densities;
  const std::vector<double> altitudes = roc.altitudes.empty() ? std::vector{rc.network.h} : roc.altitudes;

  CsvTable table("roc/1", {"p_fa", "p_d_analytic", "p_d_empirical", "gamma_thr", "lambda", "env_label", "gamma_i",
                           "altitude_m", "r0_m", "p_fa_empirical"});
  LinePlot plot{"ROC", "P_FA", "P_D", true, false, {}};
  Outcome out;
  for (const auto& env : rc.environments) {
    const EvalMethod method = rc.method.resolve(env, rc.seed);
    for (double lambda : densities) {
      for (double h : altitudes) {
        NetworkConfig net = rc.network;
        net.lambda = lambda;
        net.h = h;
        net.validate();
        const auto model = build_interference_model(net, env);
        const MixingExpectation mix(model, method);
        const std::optional<double> r0 = roc.network_average ? std::nullopt : std::optional(detail::r0_for(roc, h));
        const RocMode mode = r0 ? RocMode::single(*r0) : RocMode::network_average();
        const auto curve = roc_curve(mode, net, env, mix, roc.p_fa);
        for (const auto& f : curve.failures) {
          log << "roc: " << detail::curve_name(env, lambda, h, env.gamma_i) << ": " << f << '\n';
          out.exit_code = kExitNumerical;
        }
        std::optional<EmpiricalRoc> emp;
        if (roc.empirical) {
          TrialConfig trial;
          trial.n_trials = rc.simulation.trials;
          trial.diffuse = rc.simulation.diffuse;
          trial.r_max = rc.simulation.r_max_m;
          trial.r0 = r0;
          trial.seed = rc.seed;
          std::vector<double> thresholds;
          for (const auto& p : curve.points) thresholds.push_back(p.gamma_thr);
          emp = empirical_roc(net, env, trial, thresholds);
          for (const auto& w : emp->warnings) log << "roc: " << w << '\n';
        }
        Series s{detail::curve_name(env, lambda, h, env.gamma_i), {}, {}};
        for (std::size_t i = 0; i < curve.points.size(); ++i) {
          const auto& p = curve.points[i];
          table.row({fmt(p.p_fa), fmt(p.p_d), emp ? fmt(emp->points[i].p_d) : "", fmt(p.gamma_thr), fmt(lambda),
                     env.label, fmt(env.gamma_i), fmt(h), r0 ? fmt(*r0) : "avg",
                     emp ? fmt(emp->points[i].p_fa) : ""});
          s.x.push_back(p.p_fa);
          s.y.push_back(p.p_d);
        }
        plot.series.push_back(std::move(s));
      }
    }
  }
  out.files.push_back(write_file(rc.output_dir, "roc.csv", table.str()));
  out.files.push_back(write_file(rc.output_dir, "roc.svg", render_svg(plot)));
  return out;
}

/// P_D_avg against density with the threshold fixed by each alpha_fa.
inline Outcome cmd_sweep_density(const RunConfig& rc, std::ostream& log) {
  const auto& sw = rc.sweep;
  const auto grid = log_grid(sw.lambda_lo, sw.lambda_hi, sw.points);
  CsvTable table("pdavg_vs_lambda/1",
                 {"env_label", "gamma_i", "alpha_fa", "lambda", "gamma_thr", "p_d_avg", "miss_avg"});
  LinePlot plot{"Network-average miss probability", "lambda (per m^2)", "1 - P_D_avg", true, true, {}};
  for (const auto& env : rc.environments) {
    const EvalMethod method = rc.method.resolve(env, rc.seed);
    for (double alpha : sw.alpha_fa) {
      const DensityObjective f(alpha, rc.network, env, method);
      std::vector<TraceEntry> rows(grid.size());
      parallel_for(grid.size(), [&](std::size_t i) { rows[i] = f(grid[i]); });
      Series s{env.label + " alpha=" + fmt(alpha), {}, {}};
      std::size_t best = 0;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& e = rows[i];
        table.row({env.label, fmt(env.gamma_i), fmt(alpha), fmt(e.lambda), fmt(e.gamma_thr), fmt(e.pd_avg),
                   fmt(e.miss)});
        s.x.push_back(e.lambda);
        s.y.push_back(e.miss);
        if (e.miss < rows[best].miss) best = i;
      }
      const bool interior = best > 0 && best + 1 < rows.size();
      log << "sweep: " << env.label << " alpha_fa=" << fmt(alpha) << " max P_D_avg at lambda=" << fmt(grid[best])
          << (interior ? " (interior)" : " (boundary)") << '\n';
      plot.series.push_back(std::move(s));
    }
  }
  Outcome out;
  out.files.push_back(write_file(rc.output_dir, "pdavg_vs_lambda.csv", table.str()));
  out.files.push_back(write_file(rc.output_dir, "pdavg_vs_lambda.svg", render_svg(plot)));
  return out;
}

/// Critical density for each environment and alpha_fa.
inline Outcome cmd_optimize(const RunConfig& rc, std::ostream& log) {
  const auto& op = rc.optimize;
  DensitySearchOptions opt;
  opt.grid_points = op.points;
  opt.rel_tol = op.rel_tol;
  CsvTable result("critical_density/1",
                  {"env_label", "gamma_i", "alpha_fa", "lambda_c", "p_d_avg_max", "miss_min", "gamma_thr_at_opt",
                   "bracket_lo", "bracket_hi", "boundary_maximum", "degenerate_flat", "evaluations"});
  CsvTable trace("critical_density_trace/1",
                 {"env_label", "gamma_i", "alpha_fa", "step", "phase", "lambda", "gamma_thr", "p_d_avg", "miss_avg"});
  for (const auto& env : rc.environments) {
    const EvalMethod method = rc.method.resolve(env, rc.seed);
    for (double alpha : op.alpha_fa) {
      const auto r = critical_density(alpha, rc.network, env, op.lambda_lo, op.lambda_hi, method, opt);
      result.row({env.label, fmt(env.gamma_i), fmt(alpha), fmt(r.lambda_c), fmt(r.pd_avg_max), fmt(r.miss_min),
                  fmt(r.gamma_thr_at_opt), fmt(r.bracket_lo), fmt(r.bracket_hi), r.boundary_maximum ? "1" : "0",
                  r.degenerate_flat ? "1" : "0", std::to_string(r.trace.size())});
      for (std::size_t i = 0; i < r.trace.size(); ++i) {
        const auto& e = r.trace[i];
        trace.row({env.label, fmt(env.gamma_i), fmt(alpha), std::to_string(i), i < op.points ? "grid" : "refine",
                   fmt(e.lambda), fmt(e.gamma_thr), fmt(e.pd_avg), fmt(e.miss)});
      }
      log << "optimize: " << env.label << " alpha_fa=" << fmt(alpha) << " lambda_c=" << fmt(r.lambda_c)
          << " P_D_avg=" << fmt(r.pd_avg_max) << (r.boundary_maximum ? " [boundary maximum]" : "")
          << (r.degenerate_flat ? " [flat objective]" : "") << '\n';
    }
  }
  Outcome out;
  out.files.push_back(write_file(rc.output_dir, "critical_density.csv", result.str()));
  out.files.push_back(write_file(rc.output_dir, "critical_density_trace.csv", trace.str()));
  return out;
}

/// Analytic single-sensor ROC against the signal-level simulator.
inline Outcome cmd_validate(const RunConfig& rc, std::ostream& log) {
  const auto& va = rc.validate;
  dronedet::detail::require(!va.p_fa.empty(), "validate: empty false-alarm grid");
  CsvTable table("validation/1", {"env_label", "gamma_i", "gamma_thr", "p_fa_analytic", "p_fa_empirical",
                                  "p_fa_ci_lo", "p_fa_ci_hi", "p_d_analytic", "p_d_empirical", "p_d_ci_lo",
                                  "p_d_ci_hi", "deviation", "pass"});
  Outcome out;
  bool all_pass = true;
  for (const auto& env : rc.environments) {
    const EvalMethod method = rc.method.resolve(env, rc.seed);
    const auto model = build_interference_model(rc.network, env);
    const MixingExpectation mix(model, method);
    const auto curve = roc_curve(RocMode::single(va.r0_m), rc.network, env, mix, va.p_fa);
    for (const auto& f : curve.failures) log << "validate: " << env.label << ": " << f << '\n';
    if (!curve.failures.empty()) out.exit_code = kExitNumerical;

    TrialConfig trial;
    trial.n_trials = rc.simulation.trials;
    trial.diffuse = rc.simulation.diffuse;
    trial.r_max = rc.simulation.r_max_m;
    trial.r0 = va.r0_m;
    trial.seed = rc.seed;
    const auto trials = run_paired_trials(rc.network, env, trial);
    std::vector<double> thresholds;
    for (const auto& p : curve.points) thresholds.push_back(p.gamma_thr);
    const auto emp = empirical_roc(trials, thresholds);
    const auto rep = validation_report(curve.points, emp.points, va.tolerance, trials.size());
    for (const auto& w : rep.warnings) log << "validate: " << env.label << ": " << w << '\n';
    for (const auto& r : rep.rows)
      table.row({env.label, fmt(env.gamma_i), fmt(r.gamma_thr), fmt(r.p_fa_analytic), fmt(r.p_fa_empirical),
                 fmt(r.p_fa_ci.lo), fmt(r.p_fa_ci.hi), fmt(r.p_d_analytic), fmt(r.p_d_empirical), fmt(r.p_d_ci.lo),
                 fmt(r.p_d_ci.hi), fmt(r.deviation), r.pass ? "1" : "0"});
    log << "validate: " << env.label << " max deviation " << fmt(rep.max_deviation) << " (tolerance "
        << fmt(va.tolerance) << ") " << (rep.pass ? "PASS" : "FAIL") << '\n';
    all_pass = all_pass && rep.pass;
    if (va.dump_rss) {
      std::ostringstream s;
      trials.write(s);
      out.files.push_back(write_file(rc.output_dir, "rss_trials_" + env.label + ".csv", s.str()));
    }
  }
  out.files.push_back(write_file(rc.output_dir, "validation_report.csv", table.str()));
  if (!all_pass && out.exit_code == kExitOk) out.exit_code = kExitValidation;
  return out;
}

/// Reference xi values from the literature, at their printed precision.
struct ReferenceXi {
  double b_i;
  double value;
  int decimals;
};
inline constexpr ReferenceXi kReferenceXi[] = {{2.0, 0.637, 3}, {1.5, 0.579, 3}, {1.75, 0.7403, 4}};

/// xi(b_I) over a grid. A reference value matches when it is within one unit
/// of its last printed digit, which accepts both rounding and truncation.
inline Outcome cmd_xi_table(const RunConfig& rc, std::ostream& log) {
  const auto& xs = rc.xi_table;
  std::vector<double> bs;
  const auto n = static_cast<std::size_t>(std::floor((xs.b_hi - xs.b_lo) / xs.step + 1e-9)) + 1;
  for (std::size_t i = 0; i < n; ++i) bs.push_back(xs.b_lo + xs.step * static_cast<double>(i));
  for (const auto& p : kReferenceXi) {
    const bool present = std::any_of(bs.begin(), bs.end(), [&](double b) { return std::abs(b - p.b_i) < 1e-9; });
    if (!present) bs.push_back(p.b_i);
  }
  std::sort(bs.begin(), bs.end());

  CsvTable table("xi_table/1", {"b_i", "gamma_i", "xi", "reference", "reference_match"});
  for (double b : bs) {
    const double v = xi(b);
    std::string reference, match;
    for (const auto& p : kReferenceXi) {
      if (std::abs(b - p.b_i) > 1e-9) continue;
      char buf[16];
      std::snprintf(buf, sizeof buf, "%.*f", p.decimals, p.value);
      reference = buf;
      const bool ok = std::abs(v - p.value) < std::pow(10.0, -p.decimals);
      match = ok ? "match" : "mismatch";
      log << "xi_table: b_I=" << fmt(b) << " xi=" << fmt(v) << " reference " << reference << " -> " << match << '\n';
    }
    table.row({fmt(b), fmt(2.0 * b), fmt(v), reference, match});
  }
  Outcome out;
  out.files.push_back(write_file(rc.output_dir, "xi_table.csv", table.str()));
  return out;
}

}  // namespace dronedet::cli
