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


#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <gtest/gtest.h>

#include "dronedet/simulator.hpp"
#include "dronedet/stats.hpp"

using namespace dronedet;

namespace {

NetworkConfig reference_network() {
  NetworkConfig c;
  c.lambda = 1e-5;
  return c;
}

}  // namespace

TEST(Stats, KolmogorovTail) {
  EXPECT_NEAR(stats::kolmogorov_sf(1.3581), 0.05, 2e-4);
  EXPECT_NEAR(stats::kolmogorov_sf(1.6276), 0.01, 1e-4);
  EXPECT_EQ(stats::kolmogorov_sf(0.0), 1.0);
}

TEST(Stats, KsDetectsShift) {
  RngStream rng(41, 0);
  std::vector<double> u(2000), v(2000);
  for (auto& x : u) x = rng.uniform();
  for (auto& x : v) x = 0.1 + rng.uniform();
  auto cdf = [](double x) { return std::clamp(x, 0.0, 1.0); };
  EXPECT_TRUE(stats::ks_one_sample(u, cdf).passes(0.01));
  EXPECT_FALSE(stats::ks_one_sample(v, cdf).passes(0.01));
  EXPECT_FALSE(stats::ks_two_sample(u, v).passes(0.01));
}

TEST(Stats, WilsonInterval) {
  const auto w = stats::wilson_interval(0.5, 100);
  EXPECT_NEAR(w.lo, 0.4038, 1e-4);
  EXPECT_NEAR(w.hi, 0.5962, 1e-4);
  EXPECT_GE(stats::wilson_interval(0.0, 10).lo, 0.0);
}

TEST(Simulator, NoiseVariance) {
  RngStream rng(42, 0);
  double s = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const auto z = simulate_noise(4.0, rng);
    s += z.re * z.re + z.im * z.im;
  }
  EXPECT_NEAR(s / n, 4.0, 0.04);
}

TEST(Simulator, InterferenceVarianceGivenField) {
  const auto c = reference_network();
  RngStream frng(43, 0);
  const auto field = sample_interference_field(c, EnvironmentProfile::suburban(), default_truncation_radius(c.lambda), frng);
  ASSERT_FALSE(field.gains.empty());
  RngStream rng(43, 1);
  double sre = 0.0, sim = 0.0;
  const int n = 30000;
  for (int i = 0; i < n; ++i) {
    const auto y = simulate_interference(field, rng);
    sre += y.re * y.re;
    sim += y.im * y.im;
  }
  EXPECT_NEAR(sre / n / field.conditional_variance(), 1.0, 0.035);
  EXPECT_NEAR(sim / n / field.conditional_variance(), 1.0, 0.035);
}

TEST(Simulator, PerRealisationLaws) {
  auto c = reference_network();
  c.n0 = 1e-15;
  const auto env = EnvironmentProfile::urban();
  const auto pw = signal_powers(923.0, c, env);
  for (int r = 0; r < 5; ++r) {
    RngStream frng(44, r);
    const auto field = sample_interference_field(c, env, default_truncation_radius(c.lambda), frng);
    const double s2 = field.conditional_variance() + 0.5 * c.n0;
    RngStream rng(45, r);
    std::vector<double> null(3000), alt(3000), nlos(3000);
    for (auto& x : null) x = (simulate_interference(field, rng) + simulate_noise(c.n0, rng)).rss();
    for (auto& x : alt) {
      const auto z = simulate_drone_signal(c, env, 923.0, DiffuseMode::exact_limit(), rng, LinkState::los).z;
      x = (simulate_interference(field, rng) + simulate_noise(c.n0, rng) + z).rss();
    }
    for (auto& x : nlos) {
      const auto z = simulate_drone_signal(c, env, 923.0, DiffuseMode::finite(3), rng, LinkState::nlos).z;
      x = (simulate_interference(field, rng) + simulate_noise(c.n0, rng) + z).rss();
    }
    EXPECT_TRUE(stats::ks_one_sample(null, [&](double x) { return -std::expm1(-x / (2 * s2)); }).passes(0.01));
    const double s2a = s2 + pw.diffuse_var;
    const boost::math::non_central_chi_squared ncx(2.0, pw.mean_power / s2a);
    EXPECT_TRUE(stats::ks_one_sample(alt, [&](double x) { return boost::math::cdf(ncx, x / s2a); }).passes(0.01));
    EXPECT_TRUE(stats::ks_one_sample(nlos, [&](double x) { return -std::expm1(-x / (2 * s2a)); }).passes(0.01));
  }
}

TEST(Simulator, FiniteMultipathMatchesExactLimit) {
  const auto c = reference_network();
  const auto env = EnvironmentProfile::suburban();
  std::vector<double> exact(20000), m1(20000), m32(20000);
  RngStream rng(46, 0);
  for (std::size_t i = 0; i < exact.size(); ++i) {
    exact[i] = simulate_drone_signal(c, env, 923.0, DiffuseMode::exact_limit(), rng, LinkState::nlos).z.rss();
    m1[i] = simulate_drone_signal(c, env, 923.0, DiffuseMode::finite(1), rng, LinkState::nlos).z.rss();
    m32[i] = simulate_drone_signal(c, env, 923.0, DiffuseMode::finite(32), rng, LinkState::nlos).z.rss();
  }
  EXPECT_TRUE(stats::ks_two_sample(exact, m1).passes(0.01));
  EXPECT_TRUE(stats::ks_two_sample(exact, m32).passes(0.01));
}

TEST(Simulator, LosFrequencyFollowsSigmoid) {
  const auto c = reference_network();
  const auto env = EnvironmentProfile::urban();
  RngStream rng(47, 0);
  int los = 0;
  const int n = 50000;
  for (int i = 0; i < n; ++i) los += simulate_drone_signal(c, env, 923.0, DiffuseMode::exact_limit(), rng).los;
  const double p = los_probability(923.0, c.h, env);
  EXPECT_NEAR(static_cast<double>(los) / n, p, 4.0 * std::sqrt(p * (1 - p) / n));
}

TEST(Simulator, PairedTrialsDeterministic) {
  const auto c = reference_network();
  TrialConfig t;
  t.n_trials = 2000;
  t.seed = 5;
  const auto a = run_paired_trials(c, EnvironmentProfile::suburban(), t);
  const auto b = run_paired_trials(c, EnvironmentProfile::suburban(), t);
  EXPECT_EQ(a.rss_null, b.rss_null);
  EXPECT_EQ(a.rss_alt, b.rss_alt);
  t.seed = 6;
  EXPECT_NE(run_paired_trials(c, EnvironmentProfile::suburban(), t).rss_null, a.rss_null);

  t.seed = 5;
  t.hypothesis = Hypothesis::null;
  EXPECT_DOUBLE_EQ(simulate_observation(c, EnvironmentProfile::suburban(), t, 17).rss(), a.rss_null[17]);
  t.hypothesis = Hypothesis::alternative;
  EXPECT_DOUBLE_EQ(simulate_observation(c, EnvironmentProfile::suburban(), t, 17).rss(), a.rss_alt[17]);

  std::ostringstream os;
  a.write(os);
  EXPECT_EQ(os.str().rfind("# schema: rss_trials/1\n", 0), 0u);
}

TEST(Simulator, RandomSensorDistance) {
  const auto c = reference_network();
  TrialConfig t;
  t.n_trials = 4000;
  t.r0.reset();
  const auto a = run_paired_trials(c, EnvironmentProfile::suburban(), t);
  EXPECT_TRUE(stats::ks_one_sample(a.r0, [&](double r) { return nearest_neighbor_cdf(r, c.lambda); }).passes(0.01));
}

TEST(Simulator, EmpiricalRocCountsStrictExceedances) {
  PairedTrials t;
  t.rss_null = {1, 2, 3, 4};
  t.rss_alt = {2, 4, 6, 8};
  t.r0 = {1, 1, 1, 1};
  t.los = {0, 0, 0, 0};
  const auto roc = empirical_roc(t, {2.0, 4.0});
  EXPECT_DOUBLE_EQ(roc.points[0].p_fa, 0.5);
  EXPECT_DOUBLE_EQ(roc.points[0].p_d, 0.75);
  EXPECT_DOUBLE_EQ(roc.points[1].p_fa, 0.0);
  EXPECT_DOUBLE_EQ(roc.points[1].p_d, 0.5);
  EXPECT_EQ(roc.warnings.size(), 1u);
}

TEST(Simulator, ValidationReportContract) {
  const std::vector<DetectorPoint> a{{1.0, 0.1, 0.9}, {2.0, 0.05, 0.8}};
  const std::vector<DetectorPoint> e{{1.0, 0.11, 0.89}, {2.0, 0.05, 0.7}};
  const auto rep = validation_report(a, e, 0.02, 100000);
  EXPECT_TRUE(rep.rows[0].pass);
  EXPECT_FALSE(rep.rows[1].pass);
  EXPECT_FALSE(rep.pass);
  EXPECT_NEAR(rep.max_deviation, 0.1, 1e-12);
  EXPECT_THROW(validation_report(a, {e[0]}, 0.02, 100000), GridMismatch);
  EXPECT_THROW(validation_report(a, {e[0], {2.5, 0.05, 0.8}}, 0.02, 100000), GridMismatch);
  EXPECT_FALSE(validation_report(a, e, 0.2, 100).warnings.empty());
}

TEST(Simulator, TrialValidation) {
  TrialConfig t;
  t.n_trials = 0;
  EXPECT_THROW(t.validate(), InvalidParams);
  t = {};
  t.diffuse = DiffuseMode::finite(0);
  EXPECT_THROW(t.validate(), InvalidParams);
}

TEST(Simulator, EmptyFieldGivesNoInterference) {
  NetworkConfig c;
  c.lambda = 0.0;
  RngStream rng(48, 0);
  const auto y = simulate_interference(c, EnvironmentProfile::suburban(), 1000.0, rng);
  EXPECT_EQ(y.re, 0.0);
  EXPECT_EQ(y.im, 0.0);
}

// Y_I is symmetric stable with alpha_Y <= 1 for b_I >= 2, so it has no
// mean; its median and sign balance are checked instead.
TEST(Simulator, InterferenceIsCentred) {
  const auto c = reference_network();
  const auto env = EnvironmentProfile::suburban();
  const int n = 20000;
  std::vector<double> re(n);
  int positive = 0;
  for (int i = 0; i < n; ++i) {
    RngStream rng(49, i);
    re[i] = simulate_interference(c, env, default_truncation_radius(c.lambda), rng).re;
    positive += re[i] > 0.0;
  }
  EXPECT_NEAR(static_cast<double>(positive) / n, 0.5, 4.0 * 0.5 / std::sqrt(n));
  std::nth_element(re.begin(), re.begin() + n / 2, re.end());
  const double gamma_y = std::sqrt(build_interference_model(c, env).gamma_g / 2.0);
  // Median of a Cauchy sample has s.e. about (pi / 2) gamma / sqrt(n).
  EXPECT_NEAR(re[n / 2] / gamma_y, 0.0, 4.0 * 1.571 / std::sqrt(n));
}

TEST(Simulator, DroneSignalMoments) {
  const auto c = reference_network();
  const auto env = EnvironmentProfile::suburban();
  const auto pw = signal_powers(923.0, c, env);
  RngStream rng(50, 0);
  const int n = 1000000;
  double nlos_re2 = 0.0, los_rss = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto z = simulate_drone_signal(c, env, 923.0, DiffuseMode::exact_limit(), rng, LinkState::nlos).z;
    nlos_re2 += z.re * z.re;
    los_rss += simulate_drone_signal(c, env, 923.0, DiffuseMode::exact_limit(), rng, LinkState::los).z.rss();
  }
  EXPECT_NEAR(nlos_re2 / n / pw.diffuse_var, 1.0, 0.01);
  EXPECT_NEAR(los_rss / n / (pw.mean_power + 2.0 * pw.diffuse_var), 1.0, 0.01);
  // With the diffuse part switched off the LOS term has the fixed amplitude
  // k rho sqrt(P_d) / (sqrt(eta_L) d) at a uniform phase.
  auto dry = env;
  dry.eta_nlos = 1e300;
  for (int i = 0; i < 100; ++i) {
    const auto z = simulate_drone_signal(c, dry, 923.0, DiffuseMode::exact_limit(), rng, LinkState::los).z;
    EXPECT_NEAR(z.rss() / pw.mean_power, 1.0, 1e-12);
  }
}

TEST(Simulator, SixtyFourRaysMatchExactLimit) {
  const auto c = reference_network();
  const auto env = EnvironmentProfile::urban();
  std::vector<double> exact(20000), m64(20000);
  RngStream rng(51, 0);
  for (std::size_t i = 0; i < exact.size(); ++i) {
    exact[i] = simulate_drone_signal(c, env, 923.0, DiffuseMode::exact_limit(), rng).z.rss();
    m64[i] = simulate_drone_signal(c, env, 923.0, DiffuseMode::finite(64), rng).z.rss();
  }
  EXPECT_TRUE(stats::ks_two_sample(exact, m64).passes(0.01));
}

TEST(Simulator, EmpiricalRocLimits) {
  const auto c = reference_network();
  TrialConfig t;
  t.n_trials = 10000;
  t.seed = 52;
  const auto trials = run_paired_trials(c, EnvironmentProfile::suburban(), t);
  const double gg = build_interference_model(c, EnvironmentProfile::suburban()).gamma_g;
  std::vector<double> grid{0.0};
  for (double x = 0.01; x < 1e12; x *= 10.0) grid.push_back(x * gg);
  const auto roc = empirical_roc(trials, grid);
  EXPECT_EQ(roc.points.front().p_fa, 1.0);
  EXPECT_EQ(roc.points.front().p_d, 1.0);
  EXPECT_EQ(roc.points.back().p_fa, 0.0);
  EXPECT_EQ(roc.points.back().p_d, 0.0);
  for (const auto& p : roc.points) EXPECT_GE(p.p_d, p.p_fa) << p.gamma_thr;
  EXPECT_TRUE(roc.warnings.empty());
}

TEST(Simulator, ValidationReportExamples) {
  const std::vector<DetectorPoint> a{{1.0, 0.1, 0.9}, {2.0, 0.05, 0.8}, {3.0, 0.01, 0.6}};
  const auto same = validation_report(a, a, 0.02, 100000);
  EXPECT_EQ(same.max_deviation, 0.0);
  EXPECT_TRUE(same.pass);
  auto shifted = a;
  for (auto& p : shifted) p.p_d -= 0.05;
  const auto rep = validation_report(a, shifted, 0.02, 100000);
  EXPECT_FALSE(rep.pass);
  for (const auto& row : rep.rows) EXPECT_FALSE(row.pass);
  EXPECT_NEAR(rep.max_deviation, 0.05, 1e-12);
}

TEST(Simulator, FalseAlarmMatchesAnalytic) {
  const auto c = reference_network();
  const auto env = EnvironmentProfile::suburban();
  TrialConfig t;
  t.n_trials = 60000;
  t.seed = 53;
  const auto trials = run_paired_trials(c, env, t);
  const MixingExpectation mix(build_interference_model(c, env), EvalMethod::levy_quadrature());
  std::vector<double> grid;
  for (double alpha : {0.02, 0.1, 0.4}) grid.push_back(solve_threshold(alpha, c.n0, mix));
  const auto roc = empirical_roc(trials, grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    EXPECT_NEAR(roc.points[i].p_fa, pfa(grid[i], c.n0, mix), 0.005) << grid[i];
}

TEST(Simulator, TruncationRadiusRobustness) {
  const auto c = reference_network();
  const auto env = EnvironmentProfile::suburban();
  const double r = default_truncation_radius(c.lambda);
  TrialConfig t;
  t.n_trials = 10000;
  t.seed = 54;
  t.r_max = r;
  const MixingExpectation mix(build_interference_model(c, env), EvalMethod::levy_quadrature());
  const double g = solve_threshold(0.1, c.n0, mix);
  const double a = empirical_roc(c, env, t, {g}).points[0].p_fa;
  t.r_max = 2.0 * r;
  const double b = empirical_roc(c, env, t, {g}).points[0].p_fa;
  EXPECT_LT(std::abs(a - b), std::sqrt(0.1 * 0.9 / t.n_trials));
}
