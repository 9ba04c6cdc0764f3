// Copyright 2026 The gkpcav Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// gkpcav: experiment runner for cavity-QED grid-state generation.
//
//   gkpcav sweep  --config FILE [--out DIR] [--jobs N] [--seed U64] [--dim-cap N]
//   gkpcav state  --config FILE [--out DIR] [--seed U64] [--dim-cap N]
//   gkpcav verify [--only 1,2,...] [--budget N] [--json FILE] [--seed U64] [--dim-cap N]
//
// Exit codes: 0 success, 1 computation error, 2 config error. Errors are
// reported on stderr as a JSON document.

#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "cli.hpp"

namespace {

using gkpcav::cli::error_json;
using gkpcav::cli::ExitCode;

int run(int argc, char** argv) {
  CLI::App app{"Cavity-QED grid-state simulation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", gkpcav::schemas::kVersion);

  std::string config_path;
  gkpcav::cli::Overrides ov;
  std::string out_dir;
  int jobs = 0;
  std::uint64_t seed = 0;
  int dim_cap = 0;

  auto add_common = [&](CLI::App* sub, bool with_jobs) {
    sub->add_option("--seed", seed, "Override the config seed");
    sub->add_option("--dim-cap", dim_cap, "Maximum Fock dimension");
    if (with_jobs) sub->add_option("--jobs", jobs, "Parallel tasks")->check(CLI::PositiveNumber);
  };

  CLI::App* sweep = app.add_subcommand("sweep", "Optimize over a C0 list and write CSV + JSON");
  sweep->add_option("--config", config_path, "Experiment config (JSON)")->required();
  sweep->add_option("--out", out_dir, "Output directory");
  add_common(sweep, true);

  CLI::App* state = app.add_subcommand("state", "Compute one state and write phase-space data");
  state->add_option("--config", config_path, "Experiment config (JSON)")->required();
  state->add_option("--out", out_dir, "Output directory");
  add_common(state, true);

  CLI::App* verify = app.add_subcommand("verify", "Run the acceptance suite");
  std::vector<int> only;
  int budget = 300;
  std::string json_path;
  bool tamper = false;
  verify->add_option("--only", only, "Criterion ids to run")->delimiter(',');
  verify->add_option("--budget", budget, "Optimizer evaluations per point")
      ->check(CLI::Range(50, 100000));
  verify->add_option("--json", json_path, "Write the report as JSON");
  verify->add_flag("--tamper", tamper, "Perturb a reference constant (self-test)")->group("");
  add_common(verify, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << error_json("usage_error", e.what(), ExitCode::kConfigError) << "\n";
    return ExitCode::kConfigError;
  }

  if (!out_dir.empty()) ov.out_dir = out_dir;
  if (jobs > 0) ov.jobs = jobs;
  if (sweep->count("--seed") + state->count("--seed") + verify->count("--seed") > 0) ov.seed = seed;
  if (dim_cap > 0) ov.dim_cap = dim_cap;

  try {
    if (*sweep) return gkpcav::cli::cmd_sweep(gkpcav::cli::load_config(config_path, ov), std::cout);
    if (*state) return gkpcav::cli::cmd_state(gkpcav::cli::load_config(config_path, ov), std::cout);
    gkpcav::cli::VerifyOptions vo;
    vo.acceptance.budget = budget;
    vo.acceptance.only = only;
    if (ov.seed) vo.acceptance.seed = *ov.seed;
    if (ov.dim_cap) vo.acceptance.dim_cap = *ov.dim_cap;
    if (tamper) vo.acceptance.refs.peak_db[1] += 1.0;
    if (!json_path.empty()) vo.json_path = json_path;
    return gkpcav::cli::cmd_verify(vo, std::cout);
  } catch (const gkpcav::ConfigError& e) {
    std::cerr << error_json("config_error", e.what(), ExitCode::kConfigError) << "\n";
    return ExitCode::kConfigError;
  } catch (const std::exception& e) {
    std::cerr << error_json("computation_error", e.what(), ExitCode::kComputationError) << "\n";
    return ExitCode::kComputationError;
  }
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
