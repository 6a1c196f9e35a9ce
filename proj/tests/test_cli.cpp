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


#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "dronedet/cli/commands.hpp"
#include "dronedet/cli/config.hpp"
#include "dronedet/cli/output.hpp"

using namespace dronedet;
using namespace dronedet::cli;
namespace fs = std::filesystem;

namespace {

class CliRun : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("dronedet_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_config(const std::string& text) {
    const auto p = dir_ / "config.jsonc";
    std::ofstream(p) << text;
    return p;
  }

  int run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " \"" DRONEDET_CLI_PATH "\" " + args + " > \"" + (dir_ / "stdout").string() +
                            "\" 2> \"" + (dir_ / "stderr").string() + "\"";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path dir_;
};

}  // namespace

TEST(Config, UnitConversions) {
  EXPECT_NEAR(dbm_to_watts(20.0), 0.1, 1e-15);
  EXPECT_NEAR(dbm_to_watts(30.0), 1.0, 1e-15);
  EXPECT_NEAR(db_to_linear(21.0), std::pow(10.0, 2.1), 1e-12);
  EXPECT_NEAR(linear_to_db(100.0), 20.0, 1e-12);
}

TEST(Config, Defaults) {
  const auto c = parse_config(json::object());
  EXPECT_EQ(c.seed, 1u);
  EXPECT_NEAR(c.network.p_u, 0.1, 1e-15);
  EXPECT_NEAR(c.network.f_c, 5.8e9, 1);
  ASSERT_EQ(c.environments.size(), 1u);
  EXPECT_EQ(c.environments[0].label, "suburban");
  EXPECT_EQ(c.roc.p_fa.size(), 10u);
  EXPECT_EQ(c.validate.p_fa.size(), 10u);
}

TEST(Config, ParsesSections) {
  const auto c = parse_config(json::parse(R"({
    "seed": 9,
    "network": {"ue_power_dbm": 10, "freq_ghz": 2.4, "density_per_m2": 3e-6, "rho_mode": "uniform"},
    "environments": [{"preset": "urban", "gamma_i": 3.5}, {"preset": "custom", "a": 5, "b": 0.3,
                      "eta_los_db": 0.5, "eta_nlos_db": 18, "label": "mine"}],
    "roc": {"p_fa": [0.01, 0.1], "elevation_deg": 18, "r0_m": null},
    "simulation": {"multipath": 16, "trials": 500},
    "method": {"kind": "mc", "samples": 1234}
  })"));
  EXPECT_EQ(c.seed, 9u);
  EXPECT_NEAR(c.network.p_u, 0.01, 1e-15);
  EXPECT_NEAR(c.network.f_c, 2.4e9, 1);
  EXPECT_EQ(c.network.rho_mode, RhoMode::uniform);
  EXPECT_EQ(c.environments[0].gamma_i, 3.5);
  EXPECT_EQ(c.environments[1].label, "mine");
  EXPECT_NEAR(c.environments[1].eta_nlos, std::pow(10.0, 1.8), 1e-9);
  EXPECT_EQ(c.roc.p_fa, (std::vector<double>{0.01, 0.1}));
  EXPECT_FALSE(c.roc.r0_m);
  EXPECT_EQ(*c.simulation.diffuse.multipath, 16);
  EXPECT_EQ(c.method.resolve(c.environments[0], 3).kind, EvalMethod::Kind::stable_montecarlo);
  EXPECT_EQ(c.method.resolve(c.environments[0], 3).samples, 1234u);
}

TEST(Config, AutomaticMethodChoice) {
  const MethodConfig m;
  EXPECT_EQ(m.resolve(EnvironmentProfile::urban(4.0), 1).kind, EvalMethod::Kind::levy_quadrature);
  EXPECT_EQ(m.resolve(EnvironmentProfile::urban(3.0), 1).kind, EvalMethod::Kind::stable_montecarlo);
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(parse_config(json::parse(R"({"bogus": 1})")), ConfigError);
  EXPECT_THROW(parse_config(json::parse(R"({"network": {"density": 1}})")), ConfigError);
  EXPECT_THROW(parse_config(json::parse(R"({"environments": [{"preset": "rural"}]})")), ConfigError);
  EXPECT_THROW(parse_config(json::parse(R"({"environments": [{"gamma_i": 6}]})")), ConfigError);
  EXPECT_THROW(parse_config(json::parse(R"({"network": {"rho": 2}})")), ConfigError);
  EXPECT_THROW(parse_config(json::parse(R"({"roc": {"p_fa": {"lo": 0.5, "hi": 0.1, "count": 3}}})")), ConfigError);
  EXPECT_THROW(parse_config(json::parse(R"({"roc": {"r0_m": 900, "elevation_deg": 18}})")), ConfigError);
  EXPECT_THROW(parse_config(json::parse(R"({"simulation": {"multipath": "some"}})")), ConfigError);
  EXPECT_THROW(parse_config(json::parse(R"({"method": {"kind": "exact"}})")), ConfigError);
}

TEST(Output, CsvAndFormatting) {
  CsvTable t("demo/2", {"a", "b"});
  t.row({fmt(0.1), fmt(std::nan(""))});
  EXPECT_EQ(t.str(), "# schema: demo/2\na,b\n0.1,\n");
  EXPECT_THROW(t.row({"1"}), Error);
  EXPECT_EQ(fmt(1.0 / 3.0), "0.3333333333");
}

TEST(Output, SvgIsDeterministic) {
  LinePlot p{"t", "x", "y", true, true, {{"s", {1e-3, 1e-2, 0.1}, {0.5, 0.05, 1e-4}}}};
  const auto a = render_svg(p);
  EXPECT_EQ(a, render_svg(p));
  EXPECT_EQ(a.rfind("<svg", 0), 0u);
  EXPECT_NE(a.find("</svg>"), std::string::npos);
}

TEST_F(CliRun, XiTableAndReruns) {
  const auto cfg = write_config(R"({"xi_table": {"b_lo": 1.5, "b_hi": 2.0, "step": 0.25}})");
  ASSERT_EQ(run("xi-table --config " + cfg.string() + " --out " + (dir_ / "a").string()), 0);
  ASSERT_EQ(run("xi-table --config " + cfg.string() + " --out " + (dir_ / "b").string()), 0);
  const auto text = slurp(dir_ / "a" / "xi_table.csv");
  EXPECT_EQ(text.rfind("# schema: ", 0), 0u);
  EXPECT_EQ(text, slurp(dir_ / "b" / "xi_table.csv"));
}

TEST_F(CliRun, RocRerunsAreByteIdentical) {
  const auto cfg = write_config(R"(// comments are allowed
  {"environments": [{"preset": "urban"}, {"preset": "urban", "gamma_i": 3.5}],
   "method": {"samples": 5000},
   "roc": {"p_fa": [0.01, 0.1, 0.5], "empirical": true},
   "simulation": {"trials": 3000}})");
  ASSERT_EQ(run("roc --config " + cfg.string() + " --out " + (dir_ / "a").string() + " --seed 4"), 0);
  ASSERT_EQ(run("roc --config " + cfg.string() + " --seed 4", "DRONEDET_OUT=" + (dir_ / "b").string()), 0);
  ASSERT_EQ(run("roc --config " + cfg.string() + " --out " + (dir_ / "c").string(), "DRONEDET_SEED=5"), 0);
  const auto a = slurp(dir_ / "a" / "roc.csv");
  EXPECT_EQ(a, slurp(dir_ / "b" / "roc.csv"));
  EXPECT_EQ(slurp(dir_ / "a" / "roc.svg"), slurp(dir_ / "b" / "roc.svg"));
  EXPECT_NE(a, slurp(dir_ / "c" / "roc.csv"));
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 2 + 6);
}

TEST_F(CliRun, UsageErrorsExitOne) {
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("frobnicate"), 1);
  EXPECT_EQ(run("roc --method exact"), 1);
  EXPECT_EQ(run("roc --config " + (dir_ / "missing.json").string()), 1);
  EXPECT_EQ(run("roc --config " + write_config(R"({"roc": {"p_fa": []}})").string() + " --out " + dir_.string()), 1);
  EXPECT_EQ(run("roc --method levy --config " +
                write_config(R"({"environments": [{"preset": "urban", "gamma_i": 3.5}]})").string() + " --out " +
                dir_.string()),
            1);
  EXPECT_EQ(run("roc --config " + write_config("{ not json").string()), 1);
}

TEST_F(CliRun, NumericalFailureExitsTwo) {
  // No interferers and no noise: no threshold meets the false-alarm target.
  const auto cfg = write_config(R"({"network": {"density_per_m2": 0, "noise_w_per_hz": 0}})");
  EXPECT_EQ(run("roc --config " + cfg.string() + " --out " + dir_.string()), 2);
}

TEST_F(CliRun, ValidationBreachExitsThree) {
  const auto cfg = write_config(R"({"simulation": {"trials": 2000},
                                    "validate": {"tolerance": 1e-6, "p_fa": [0.1, 0.5]}})");
  EXPECT_EQ(run("validate --config " + cfg.string() + " --out " + dir_.string()), 3);
  const auto report = slurp(dir_ / "validation_report.csv");
  EXPECT_EQ(report.rfind("# schema: validation/1\n", 0), 0u);
  EXPECT_NE(report.find(",0\n"), std::string::npos);
}

TEST_F(CliRun, XiTableTagsReferenceMatch) {
  const auto cfg = write_config(R"({"xi_table": {"b_lo": 1.5, "b_hi": 2.0, "step": 0.5}})");
  ASSERT_EQ(run("xi-table --config " + cfg.string() + " --out " + dir_.string()), 0);
  std::istringstream in(slurp(dir_ / "xi_table.csv"));
  std::string line;
  bool seen = false;
  while (std::getline(in, line)) {
    if (line.rfind("2,", 0) != 0) continue;
    seen = true;
    EXPECT_NE(line.find(",0.63"), std::string::npos) << line;
    EXPECT_EQ(line.substr(line.size() - 6), ",match") << line;
  }
  EXPECT_TRUE(seen);
}

TEST_F(CliRun, SweepHasInteriorMaximum) {
  const auto cfg = write_config(R"({"environments": [{"preset": "suburban"}],
    "sweep": {"lambda_lo_per_m2": 1e-7, "lambda_hi_per_m2": 1e-3, "points": 25, "alpha_fa": [0.1, 0.01]}})");
  ASSERT_EQ(run("sweep-density --method levy --config " + cfg.string() + " --out " + dir_.string()), 0);
  std::istringstream in(slurp(dir_ / "pdavg_vs_lambda.csv"));
  std::string line;
  std::map<std::string, std::vector<double>> miss;  // alpha_fa -> miss_avg along the grid
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("env_label", 0) == 0) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    ASSERT_EQ(cells.size(), 7u) << line;
    miss[cells[2]].push_back(std::stod(cells[6]));
  }
  ASSERT_EQ(miss.size(), 2u);
  for (const auto& [alpha, m] : miss) {
    ASSERT_EQ(m.size(), 25u);
    const auto best = std::min_element(m.begin(), m.end()) - m.begin();
    EXPECT_GT(best, 0) << alpha;
    EXPECT_LT(best, 24) << alpha;
  }
}
