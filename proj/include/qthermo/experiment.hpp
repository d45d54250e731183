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

#ifndef QTHERMO_EXPERIMENT_HPP_
#define QTHERMO_EXPERIMENT_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qthermo/encoding.hpp"
#include "qthermo/models.hpp"
#include "qthermo/optimize.hpp"
#include "qthermo/oracle.hpp"

namespace qthermo {

inline constexpr int kSummarySchemaVersion = 1;

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitNotConverged = 4;

struct ChargeEntry {
  std::string word;  // logical digit word, e.g. "22"
  double target = 0.0;
  bool operator==(const ChargeEntry&) const = default;
};

struct ModelConfig {
  std::string type = "heisenberg";  // heisenberg | stabilizer
  // Heisenberg block.
  std::string geometry = "line";    // line | grid
  int n = 3;
  int rows = 2;
  int cols = 3;
  bool nnn = false;
  double J = 1.0;
  double lambda = 0.5;
  std::vector<double> targets;
  // Stabilizer block.
  std::string code;
  std::vector<ChargeEntry> charges;
  std::optional<std::vector<double>> bloch;
  std::vector<double> gammas;
  bool operator==(const ModelConfig&) const = default;
};

struct SolverConfig {
  std::string variant = "first_classical";
  double epsilon = 0.1;
  std::optional<double> temperature;
  std::optional<double> eta;
  std::optional<double> delta;
  int max_iter = 20000;
  std::optional<bool> nesterov;
  double backtrack_factor = 0.5;
  std::optional<double> hessian_regularization_floor;
  int max_backtracks = 40;
  std::int64_t shots_per_iteration = 10000;
  int hessian_time_samples = 1000;
  std::int64_t hessian_shots = 10;
  std::string hessian_mode = "generic";  // generic | extensive
  std::string warm_start = "none";       // none | signed | normalized
  bool operator==(const SolverConfig&) const = default;
};

struct OracleConfig {
  bool enabled = true;
  int iterations = 2000;
  double tolerance = 1e-9;
  bool operator==(const OracleConfig&) const = default;
};

struct SweepConfig {
  std::string parameter;  // T | shots | eta
  std::vector<double> values;
  bool operator==(const SweepConfig&) const = default;
};

struct ExperimentConfig {
  std::string name = "experiment";
  ModelConfig model;
  SolverConfig solver;
  OracleConfig oracle;
  std::optional<int> repetitions;  // default 5 for shot-based variants, else 1
  std::uint64_t seed = 0;
  std::optional<SweepConfig> sweep;
  std::optional<std::string> output;  // artifact directory; --out overrides
  bool operator==(const ExperimentConfig&) const = default;

  int resolve_repetitions() const;
};

// Strict JSON parsing: unknown keys and type mismatches raise ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& config);

struct BuiltModel {
  ThermoSystem system;
  std::optional<StabilizerCode> code;
  std::optional<LogicalTarget> logical_target;  // when the charges fix the full logical state
};

BuiltModel build_model(const ModelConfig& model);
OptimizerConfig optimizer_config(const ExperimentConfig& config, const BuiltModel& model);
std::uint64_t repetition_seed(std::uint64_t seed, int repetition);

struct ExperimentOutcome {
  ExperimentConfig config;
  BuiltModel model;
  std::optional<DualSolution> oracle;
  std::vector<Trace> traces;
  // Fidelity of the final thermal state of each run with the encoded target.
  std::vector<std::optional<double>> fidelities;
  // Error metric of each run's final mu evaluated with exact expectations;
  // set when a reference value exists.
  std::vector<std::optional<double>> exact_errors;
  double wall_seconds = 0.0;
};

// Runs oracle and solver repetitions without touching the filesystem.
ExperimentOutcome execute(const ExperimentConfig& config, int workers = 1);

std::string format_double(double x);
std::string trace_csv(const ExperimentOutcome& outcome);
std::string aggregate_csv(const ExperimentOutcome& outcome);
std::string summary_json(const ExperimentOutcome& outcome);
bool all_converged(const ExperimentOutcome& outcome);

struct CommandOptions {
  std::optional<std::string> out_dir;  // falls back to config output, then "out"
  std::optional<std::uint64_t> seed;
  bool strict = false;
  int workers = 1;
};

// CLI entry points; return a process exit code and write artifacts to out_dir.
int run_command(const std::string& config_path, const CommandOptions& options);
int sweep_command(const std::string& config_path, const std::optional<std::string>& parameter,
                  const std::vector<double>& values, const CommandOptions& options);
int verify_command(const std::string& suite, const CommandOptions& options);

struct VerifyCheck {
  std::string name;
  bool passed = false;
  double max_error = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct VerifyReport {
  std::string suite;
  std::vector<VerifyCheck> checks;
  bool passed() const;
};

// suite: formulas | gradients | codes
VerifyReport run_verify_suite(const std::string& suite, std::uint64_t seed = 7);

}  // namespace qthermo

#endif  // QTHERMO_EXPERIMENT_HPP_
