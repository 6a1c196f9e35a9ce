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

/// @file config.hpp
/// JSON run configuration. Every physical quantity carries its unit in the
/// key name; dBm and dB values are converted to linear units here.

#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dronedet/channel.hpp"
#include "dronedet/detector.hpp"
#include "dronedet/error.hpp"
#include "dronedet/geometry.hpp"
#include "dronedet/optimizer.hpp"
#include "dronedet/simulator.hpp"

namespace dronedet::cli {

using json = nlohmann::json;

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

enum class MethodChoice { automatic, levy, mc };

struct MethodConfig {
  MethodChoice kind = MethodChoice::automatic;
  std::size_t samples = 200000;

  /// Lévy quadrature where it applies (b_I = 2), Monte Carlo otherwise,
  /// unless a kind was chosen explicitly.
  EvalMethod resolve(const EnvironmentProfile& env, std::uint64_t seed) const {
    const bool levy = kind == MethodChoice::levy || (kind == MethodChoice::automatic && env.b_i() == 2.0);
    return levy ? EvalMethod::levy_quadrature() : EvalMethod::stable_montecarlo(samples, seed);
  }
};

struct RocSection {
  std::vector<double> p_fa;
  std::vector<double> densities;  // empty: network.lambda only
  std::vector<double> altitudes;  // empty: network.h only
  std::optional<double> r0_m = 923.0;
  std::optional<double> elevation_deg;  // fixes r0 = h / tan(theta) per altitude
  bool network_average = false;
  bool empirical = false;
};

struct RangeSection {
  double lambda_lo = 1e-7;
  double lambda_hi = 1e-3;
  std::size_t points = 33;
  double rel_tol = 1e-3;
  std::vector<double> alpha_fa{0.1, 0.01};
};

struct SimulationSection {
  std::size_t trials = 100000;
  DiffuseMode diffuse = DiffuseMode::exact_limit();
  double r_max_m = 0.0;
};

struct ValidateSection {
  double tolerance = 0.02;
  double r0_m = 923.0;
  std::vector<double> p_fa;
  bool dump_rss = false;
};

struct XiSection {
  double b_lo = 1.0;
  double b_hi = 3.0;
  double step = 0.05;
};

struct RunConfig {
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  MethodConfig method;
  NetworkConfig network;
  std::vector<EnvironmentProfile> environments{EnvironmentProfile::suburban()};
  RocSection roc;
  RangeSection sweep;
  RangeSection optimize;
  SimulationSection simulation;
  ValidateSection validate;
  XiSection xi_table;
};

namespace detail {

inline void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& item : j.items())
    if (!ok.count(item.key())) throw ConfigError(where + ": unknown key '" + item.key() + "'");
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

/// Either a list of values or {"lo", "hi", "count"} for a log-spaced grid.
inline std::vector<double> read_grid(const json& j, const std::string& where) {
  if (j.is_array()) {
    std::vector<double> v;
    for (const auto& x : j) {
      if (!x.is_number()) throw ConfigError(where + ": grid entries must be numbers");
      v.push_back(x.get<double>());
    }
    return v;
  }
  check_keys(j, where, {"lo", "hi", "count"});
  double lo = 0.0, hi = 0.0;
  std::size_t count = 0;
  read(j, "lo", lo, where);
  read(j, "hi", hi, where);
  read(j, "count", count, where);
  if (!(lo > 0.0 && hi > lo && count >= 2)) throw ConfigError(where + ": need 0 < lo < hi and count >= 2");
  return log_grid(lo, hi, count);
}

inline EnvironmentProfile read_environment(const json& j, const std::string& where) {
  check_keys(j, where, {"preset", "label", "a", "b", "eta_los_db", "eta_nlos_db", "gamma_i", "sigma_s"});
  std::string preset = "suburban";
  read(j, "preset", preset, where);
  EnvironmentProfile env;
  if (preset == "suburban") env = EnvironmentProfile::suburban();
  else if (preset == "urban") env = EnvironmentProfile::urban();
  else if (preset == "custom") env.label = "custom";
  else throw ConfigError(where + ".preset: expected suburban, urban or custom");
  read(j, "a", env.a, where);
  read(j, "b", env.b, where);
  if (j.contains("eta_los_db")) env.eta_los = db_to_linear(j.at("eta_los_db").get<double>());
  if (j.contains("eta_nlos_db")) env.eta_nlos = db_to_linear(j.at("eta_nlos_db").get<double>());
  read(j, "gamma_i", env.gamma_i, where);
  read(j, "sigma_s", env.sigma_s, where);
  read(j, "label", env.label, where);
  try {
    env.validate();
  } catch (const InvalidParams& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return env;
}

inline void read_range(const json& j, RangeSection& r, const std::string& where) {
  check_keys(j, where, {"lambda_lo_per_m2", "lambda_hi_per_m2", "points", "grid_points", "rel_tol", "alpha_fa"});
  read(j, "lambda_lo_per_m2", r.lambda_lo, where);
  read(j, "lambda_hi_per_m2", r.lambda_hi, where);
  read(j, "points", r.points, where);
  read(j, "grid_points", r.points, where);
  read(j, "rel_tol", r.rel_tol, where);
  read(j, "alpha_fa", r.alpha_fa, where);
  if (!(r.lambda_lo > 0.0 && r.lambda_hi > r.lambda_lo)) throw ConfigError(where + ": need 0 < lambda_lo < lambda_hi");
  if (r.points < 2) throw ConfigError(where + ": need at least 2 points");
  if (r.alpha_fa.empty()) throw ConfigError(where + ".alpha_fa: empty list");
  for (double a : r.alpha_fa)
    if (!(a > 0.0 && a < 1.0)) throw ConfigError(where + ".alpha_fa: values must lie in (0, 1)");
}

}  // namespace detail

inline RunConfig parse_config(const json& j) {
  using detail::check_keys;
  using detail::read;
  RunConfig c;
  check_keys(j, "config", {"seed", "output_dir", "method", "network", "environments", "roc", "sweep", "optimize",
                           "simulation", "validate", "xi_table", "description"});
  read(j, "seed", c.seed, "config");
  read(j, "output_dir", c.output_dir, "config");

  if (j.contains("method")) {
    const auto& m = j.at("method");
    check_keys(m, "method", {"kind", "samples"});
    std::string kind = "auto";
    read(m, "kind", kind, "method");
    if (kind == "auto") c.method.kind = MethodChoice::automatic;
    else if (kind == "levy") c.method.kind = MethodChoice::levy;
    else if (kind == "mc") c.method.kind = MethodChoice::mc;
    else throw ConfigError("method.kind: expected auto, levy or mc");
    read(m, "samples", c.method.samples, "method");
    if (c.method.samples == 0) throw ConfigError("method.samples must be positive");
  }

  if (j.contains("network")) {
    const auto& n = j.at("network");
    check_keys(n, "network", {"ue_power_dbm", "drone_power_dbm", "freq_ghz", "noise_w_per_hz", "altitude_m",
                              "density_per_m2", "rho", "rho_mode", "shadowing_moment"});
    auto& net = c.network;
    if (n.contains("ue_power_dbm")) net.p_u = dbm_to_watts(n.at("ue_power_dbm").get<double>());
    if (n.contains("drone_power_dbm")) net.p_d = dbm_to_watts(n.at("drone_power_dbm").get<double>());
    if (n.contains("freq_ghz")) net.f_c = n.at("freq_ghz").get<double>() * 1e9;
    read(n, "noise_w_per_hz", net.n0, "network");
    read(n, "altitude_m", net.h, "network");
    read(n, "density_per_m2", net.lambda, "network");
    read(n, "rho", net.rho, "network");
    std::string rho_mode = "fixed_one";
    read(n, "rho_mode", rho_mode, "network");
    if (rho_mode == "fixed_one") net.rho_mode = RhoMode::fixed_one;
    else if (rho_mode == "uniform") net.rho_mode = RhoMode::uniform;
    else throw ConfigError("network.rho_mode: expected fixed_one or uniform");
    std::string shadow = "exact";
    read(n, "shadowing_moment", shadow, "network");
    if (shadow == "exact") net.shadowing = ShadowingMoment::exact;
    else if (shadow == "simplified") net.shadowing = ShadowingMoment::simplified;
    else throw ConfigError("network.shadowing_moment: expected exact or simplified");
    try {
      net.validate();
    } catch (const InvalidParams& e) {
      throw ConfigError(e.what());
    }
  }

  if (j.contains("environments")) {
    const auto& e = j.at("environments");
    if (!e.is_array() || e.empty()) throw ConfigError("environments: expected a non-empty list");
    c.environments.clear();
    for (std::size_t i = 0; i < e.size(); ++i)
      c.environments.push_back(detail::read_environment(e[i], "environments[" + std::to_string(i) + "]"));
  }

  if (j.contains("roc")) {
    const auto& r = j.at("roc");
    check_keys(r, "roc", {"p_fa", "densities_per_m2", "altitudes_m", "r0_m", "elevation_deg", "network_average",
                          "empirical"});
    if (r.contains("p_fa")) c.roc.p_fa = detail::read_grid(r.at("p_fa"), "roc.p_fa");
    read(r, "densities_per_m2", c.roc.densities, "roc");
    read(r, "altitudes_m", c.roc.altitudes, "roc");
    if (r.contains("r0_m")) c.roc.r0_m = r.at("r0_m").is_null() ? std::nullopt : std::optional(r.at("r0_m").get<double>());
    if (r.contains("elevation_deg") && !r.at("elevation_deg").is_null()) {
      c.roc.elevation_deg = r.at("elevation_deg").get<double>();
      if (r.contains("r0_m") && !r.at("r0_m").is_null())
        throw ConfigError("roc: give either r0_m or elevation_deg, not both");
      if (!(*c.roc.elevation_deg > 0.0 && *c.roc.elevation_deg <= 90.0))
        throw ConfigError("roc.elevation_deg must lie in (0, 90]");
    }
    read(r, "network_average", c.roc.network_average, "roc");
    read(r, "empirical", c.roc.empirical, "roc");
    if (c.roc.network_average && c.roc.empirical)
      throw ConfigError("roc: the empirical curve needs a fixed r0, not the network average");
  }
  if (!(j.contains("roc") && j.at("roc").contains("p_fa"))) c.roc.p_fa = log_grid(1e-3, 0.5, 10);

  if (j.contains("sweep")) detail::read_range(j.at("sweep"), c.sweep, "sweep");
  if (j.contains("optimize")) detail::read_range(j.at("optimize"), c.optimize, "optimize");

  if (j.contains("simulation")) {
    const auto& s = j.at("simulation");
    check_keys(s, "simulation", {"trials", "multipath", "r_max_m"});
    read(s, "trials", c.simulation.trials, "simulation");
    if (s.contains("multipath")) {
      const auto& m = s.at("multipath");
      if (m.is_string() && m.get<std::string>() == "exact") c.simulation.diffuse = DiffuseMode::exact_limit();
      else if (m.is_number_integer() && m.get<int>() >= 1) c.simulation.diffuse = DiffuseMode::finite(m.get<int>());
      else throw ConfigError("simulation.multipath: expected \"exact\" or a positive integer");
    }
    read(s, "r_max_m", c.simulation.r_max_m, "simulation");
    if (c.simulation.trials == 0) throw ConfigError("simulation.trials must be positive");
  }

  if (j.contains("validate")) {
    const auto& v = j.at("validate");
    check_keys(v, "validate", {"tolerance", "r0_m", "p_fa", "dump_rss"});
    read(v, "tolerance", c.validate.tolerance, "validate");
    read(v, "r0_m", c.validate.r0_m, "validate");
    if (v.contains("p_fa")) c.validate.p_fa = detail::read_grid(v.at("p_fa"), "validate.p_fa");
    read(v, "dump_rss", c.validate.dump_rss, "validate");
  }
  if (!(j.contains("validate") && j.at("validate").contains("p_fa")))
    c.validate.p_fa = log_grid(1e-3, 0.5, 10);

  if (j.contains("xi_table")) {
    const auto& x = j.at("xi_table");
    check_keys(x, "xi_table", {"b_lo", "b_hi", "step"});
    read(x, "b_lo", c.xi_table.b_lo, "xi_table");
    read(x, "b_hi", c.xi_table.b_hi, "xi_table");
    read(x, "step", c.xi_table.step, "xi_table");
    if (!(c.xi_table.b_lo > 0.0 && c.xi_table.b_hi >= c.xi_table.b_lo && c.xi_table.step > 0.0))
      throw ConfigError("xi_table: need 0 < b_lo <= b_hi and step > 0");
  }
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_config(j);
}

}  // namespace dronedet::cli
