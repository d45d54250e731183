// Copyright 2026 The qthermo Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// qthermo: run, sweep and verify constrained thermal-state experiments.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qthermo/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Constrained thermal-state preparation experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool strict = false;
  int workers = 1;
  std::string suite = "all";
  std::string param;
  std::vector<double> values;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    if (needs_config) sub->add_option("--config", config_path, "experiment JSON file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "artifact directory");
    sub->add_option("--seed", seed, "master seed (overrides the config)");
    sub->add_flag("--strict", strict, "exit 4 when a run does not converge");
    sub->add_option("--workers", workers, "concurrent repetitions")->check(CLI::PositiveNumber);
  };

  CLI::App* run = app.add_subcommand("run", "run one experiment");
  add_common(run, true);
  CLI::App* sweep = app.add_subcommand("sweep", "run one experiment per parameter value");
  add_common(sweep, true);
  sweep->add_option("--param", param, "T | shots | eta")->check(CLI::IsMember({"T", "shots", "eta"}));
  sweep->add_option("--values", values, "parameter values")->delimiter(',');
  CLI::App* verify = app.add_subcommand("verify", "run a property suite");
  add_common(verify, false);
  verify->add_option("--suite", suite, "formulas | gradients | codes | all")
      ->check(CLI::IsMember({"formulas", "gradients", "codes", "all"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : qthermo::kExitConfig;
  }

  qthermo::CommandOptions options;
  if (!out_dir.empty()) options.out_dir = out_dir;
  if (app.got_subcommand(run) ? run->count("--seed") > 0
                              : app.got_subcommand(sweep) ? sweep->count("--seed") > 0 : verify->count("--seed") > 0) {
    options.seed = seed;
  }
  options.strict = strict;
  options.workers = workers;

  if (app.got_subcommand(run)) return qthermo::run_command(config_path, options);
  if (app.got_subcommand(sweep)) {
    std::optional<std::string> parameter;
    if (!param.empty()) parameter = param;
    return qthermo::sweep_command(config_path, parameter, values, options);
  }
  return qthermo::verify_command(suite, options);
}
