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

// dronedet command-line driver.
//
//   dronedet <roc|sweep-density|optimize|validate|xi-table>
//            [--config PATH] [--out DIR] [--seed N] [--method levy|mc]
//
// DRONEDET_SEED and DRONEDET_OUT override the config when the flags are
// absent. Exit codes: 0 ok, 1 usage, 2 numerical failure, 3 validation breach.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dronedet/cli/commands.hpp"
#include "dronedet/cli/config.hpp"
#include "dronedet/error.hpp"

namespace {

using namespace dronedet;

int run(const std::string& verb, cli::RunConfig rc) {
  cli::Outcome out;
  if (verb == "roc") out = cli::cmd_roc(rc, std::cerr);
  else if (verb == "sweep-density") out = cli::cmd_sweep_density(rc, std::cerr);
  else if (verb == "optimize") out = cli::cmd_optimize(rc, std::cerr);
  else if (verb == "validate") out = cli::cmd_validate(rc, std::cerr);
  else if (verb == "xi-table") out = cli::cmd_xi_table(rc, std::cerr);
  for (const auto& f : out.files) std::cout << f << '\n';
  return out.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RSS drone detection in a Poisson field of interferers"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::string method;
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory")->envname("DRONEDET_OUT");
  app.add_option("--seed", seed, "master seed")->envname("DRONEDET_SEED");
  app.add_option("--method", method, "expectation over V: levy or mc")->check(CLI::IsMember({"levy", "mc"}));

  for (const char* verb : {"roc", "sweep-density", "optimize", "validate", "xi-table"})
    app.add_subcommand(verb)->fallthrough();
  app.get_subcommand("roc")->description("ROC curves, analytic and optionally simulated");
  app.get_subcommand("sweep-density")->description("network-average detection against density");
  app.get_subcommand("optimize")->description("critical density under a false-alarm constraint");
  app.get_subcommand("validate")->description("analytic ROC against the signal-level simulator");
  app.get_subcommand("xi-table")->description("xi(b_I) table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kExitUsage;
  }

  try {
    cli::RunConfig rc = config_path.empty() ? cli::parse_config(cli::json::object()) : cli::load_config(config_path);
    if (out_dir) rc.output_dir = *out_dir;
    if (seed) rc.seed = *seed;
    if (method == "levy") rc.method.kind = cli::MethodChoice::levy;
    if (method == "mc") rc.method.kind = cli::MethodChoice::mc;
    return run(app.get_subcommands().front()->get_name(), rc);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return cli::kExitUsage;
  } catch (const InvalidParams& e) {
    std::cerr << "invalid parameters: " << e.what() << '\n';
    return cli::kExitUsage;
  } catch (const MethodMismatch& e) {
    std::cerr << "method mismatch: " << e.what() << '\n';
    return cli::kExitUsage;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return cli::kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitNumerical;
  }
}
