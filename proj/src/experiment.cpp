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

#include "qthermo/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>
#include <thread>
#include <utility>

#include <fmt/format.h>
#include <json.hpp>

#include "qthermo/error.hpp"
#include "qthermo/gibbs.hpp"
#include "qthermo/shots.hpp"

namespace qthermo {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(fmt::format("{} must be an object", where));
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw ConfigError(fmt::format("unknown key '{}' in {}", key, where));
  }
}

[[noreturn]] void type_error(const std::string& where, const std::string& key, const char* expected) {
  throw ConfigError(fmt::format("{}.{} must be {}", where, key, expected));
}

double get_number(const json& v, const std::string& where, const std::string& key) {
  if (!v.is_number()) type_error(where, key, "a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) type_error(where, key, "finite");
  return x;
}

std::int64_t get_integer(const json& v, const std::string& where, const std::string& key) {
  if (!v.is_number_integer()) type_error(where, key, "an integer");
  return v.get<std::int64_t>();
}

int get_int(const json& v, const std::string& where, const std::string& key) {
  const std::int64_t x = get_integer(v, where, key);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
    type_error(where, key, "a 32-bit integer");
  }
  return static_cast<int>(x);
}

bool get_bool(const json& v, const std::string& where, const std::string& key) {
  if (!v.is_boolean()) type_error(where, key, "a boolean");
  return v.get<bool>();
}

std::string get_string(const json& v, const std::string& where, const std::string& key) {
  if (!v.is_string()) type_error(where, key, "a string");
  return v.get<std::string>();
}

std::vector<double> get_numbers(const json& v, const std::string& where, const std::string& key) {
  if (!v.is_array()) type_error(where, key, "an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(get_number(x, where, key));
  return out;
}

ModelConfig parse_model(const json& j) {
  const std::string w = "model";
  check_keys(j, {"type", "geometry", "n", "rows", "cols", "nnn", "J", "lambda", "targets", "code", "charges", "bloch",
                 "gammas"},
             w);
  ModelConfig m;
  if (j.contains("type")) m.type = get_string(j["type"], w, "type");
  if (j.contains("geometry")) m.geometry = get_string(j["geometry"], w, "geometry");
  if (j.contains("n")) m.n = get_int(j["n"], w, "n");
  if (j.contains("rows")) m.rows = get_int(j["rows"], w, "rows");
  if (j.contains("cols")) m.cols = get_int(j["cols"], w, "cols");
  if (j.contains("nnn")) m.nnn = get_bool(j["nnn"], w, "nnn");
  if (j.contains("J")) m.J = get_number(j["J"], w, "J");
  if (j.contains("lambda")) m.lambda = get_number(j["lambda"], w, "lambda");
  if (j.contains("targets")) m.targets = get_numbers(j["targets"], w, "targets");
  if (j.contains("code")) m.code = get_string(j["code"], w, "code");
  if (j.contains("charges")) {
    if (!j["charges"].is_array()) type_error(w, "charges", "an array");
    for (const auto& c : j["charges"]) {
      check_keys(c, {"word", "target"}, "model.charges[]");
      if (!c.contains("word") || !c.contains("target")) {
        throw ConfigError("model.charges[] needs both word and target");
      }
      m.charges.push_back({get_string(c["word"], "model.charges[]", "word"),
                           get_number(c["target"], "model.charges[]", "target")});
    }
  }
  if (j.contains("bloch")) m.bloch = get_numbers(j["bloch"], w, "bloch");
  if (j.contains("gammas")) m.gammas = get_numbers(j["gammas"], w, "gammas");
  return m;
}

SolverConfig parse_solver(const json& j) {
  const std::string w = "solver";
  check_keys(j, {"variant", "epsilon", "temperature", "eta", "delta", "max_iter", "nesterov", "backtrack_factor",
                 "hessian_regularization_floor", "max_backtracks", "shots_per_iteration", "hessian_time_samples",
                 "hessian_shots", "hessian_mode", "warm_start"},
             w);
  SolverConfig s;
  if (j.contains("variant")) s.variant = get_string(j["variant"], w, "variant");
  if (j.contains("epsilon")) s.epsilon = get_number(j["epsilon"], w, "epsilon");
  if (j.contains("temperature")) s.temperature = get_number(j["temperature"], w, "temperature");
  if (j.contains("eta")) s.eta = get_number(j["eta"], w, "eta");
  if (j.contains("delta")) s.delta = get_number(j["delta"], w, "delta");
  if (j.contains("max_iter")) s.max_iter = get_int(j["max_iter"], w, "max_iter");
  if (j.contains("nesterov")) s.nesterov = get_bool(j["nesterov"], w, "nesterov");
  if (j.contains("backtrack_factor")) s.backtrack_factor = get_number(j["backtrack_factor"], w, "backtrack_factor");
  if (j.contains("hessian_regularization_floor")) {
    s.hessian_regularization_floor =
        get_number(j["hessian_regularization_floor"], w, "hessian_regularization_floor");
  }
  if (j.contains("max_backtracks")) s.max_backtracks = get_int(j["max_backtracks"], w, "max_backtracks");
  if (j.contains("shots_per_iteration")) {
    s.shots_per_iteration = get_integer(j["shots_per_iteration"], w, "shots_per_iteration");
  }
  if (j.contains("hessian_time_samples")) {
    s.hessian_time_samples = get_int(j["hessian_time_samples"], w, "hessian_time_samples");
  }
  if (j.contains("hessian_shots")) s.hessian_shots = get_integer(j["hessian_shots"], w, "hessian_shots");
  if (j.contains("hessian_mode")) s.hessian_mode = get_string(j["hessian_mode"], w, "hessian_mode");
  if (j.contains("warm_start")) s.warm_start = get_string(j["warm_start"], w, "warm_start");
  return s;
}

OracleConfig parse_oracle(const json& j) {
  const std::string w = "oracle";
  check_keys(j, {"enabled", "iterations", "tolerance"}, w);
  OracleConfig o;
  if (j.contains("enabled")) o.enabled = get_bool(j["enabled"], w, "enabled");
  if (j.contains("iterations")) o.iterations = get_int(j["iterations"], w, "iterations");
  if (j.contains("tolerance")) o.tolerance = get_number(j["tolerance"], w, "tolerance");
  return o;
}

SweepConfig parse_sweep(const json& j) {
  const std::string w = "sweep";
  check_keys(j, {"parameter", "values"}, w);
  SweepConfig s;
  if (j.contains("parameter")) s.parameter = get_string(j["parameter"], w, "parameter");
  if (j.contains("values")) s.values = get_numbers(j["values"], w, "values");
  return s;
}

void validate_config(const ExperimentConfig& c) {
  if (c.model.type != "heisenberg" && c.model.type != "stabilizer") {
    throw ConfigError(fmt::format("unknown model type '{}'", c.model.type));
  }
  parse_variant(c.solver.variant);
  if (c.solver.hessian_mode != "generic" && c.solver.hessian_mode != "extensive") {
    throw ConfigError(fmt::format("unknown hessian_mode '{}'", c.solver.hessian_mode));
  }
  if (c.solver.warm_start != "none" && c.solver.warm_start != "signed" && c.solver.warm_start != "normalized") {
    throw ConfigError(fmt::format("unknown warm_start '{}'", c.solver.warm_start));
  }
  if (!(c.solver.epsilon > 0.0)) throw ConfigError("solver.epsilon must be positive");
  if (c.solver.shots_per_iteration <= 0) throw ConfigError("solver.shots_per_iteration must be positive");
  if (c.solver.hessian_time_samples <= 0) throw ConfigError("solver.hessian_time_samples must be positive");
  if (c.solver.hessian_shots <= 0) throw ConfigError("solver.hessian_shots must be positive");
  if (c.solver.max_backtracks < 0) throw ConfigError("solver.max_backtracks must be non-negative");
  if (c.oracle.iterations <= 0) throw ConfigError("oracle.iterations must be positive");
  if (!(c.oracle.tolerance > 0.0)) throw ConfigError("oracle.tolerance must be positive");
  if (c.repetitions && *c.repetitions <= 0) throw ConfigError("repetitions must be positive");
  if (c.sweep && c.sweep->parameter != "T" && c.sweep->parameter != "shots" && c.sweep->parameter != "eta") {
    throw ConfigError(fmt::format("unknown sweep parameter '{}'", c.sweep->parameter));
  }
}

template <class T>
void put_optional(ordered_json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

bool is_hqc_config(const ExperimentConfig& c) { return is_hqc(parse_variant(c.solver.variant)); }

// Charge index -> logical digit for k = 1 models, or -1.
std::vector<int> single_digit_words(const ModelConfig& model, int k) {
  std::vector<int> digits;
  if (k != 1) return digits;
  if (model.bloch) return {1, 2, 3};
  for (const auto& c : model.charges) digits.push_back(parse_logical_word(c.word, k)[0]);
  return digits;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot read config file '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_artifacts(const fs::path& dir, const std::vector<std::pair<std::string, std::string>>& files) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ResourceError(fmt::format("cannot create output directory '{}': {}", dir.string(), ec.message()));
  for (const auto& [name, content] : files) {
    const fs::path target = dir / name;
    const fs::path tmp = dir / (name + ".tmp");
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw ResourceError(fmt::format("cannot write '{}'", tmp.string()));
      out << content;
      if (!out) throw ResourceError(fmt::format("cannot write '{}'", tmp.string()));
    }
    fs::rename(tmp, target, ec);
    if (ec) throw ResourceError(fmt::format("cannot move '{}' into place: {}", target.string(), ec.message()));
  }
}

fs::path resolve_out_dir(const ExperimentConfig& config, const CommandOptions& options) {
  if (options.out_dir) return *options.out_dir;
  if (config.output) return *config.output;
  return "out";
}

// Maps exceptions to exit codes after printing a one-line diagnostic.
template <class F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
}

std::string header_columns(int charges) {
  std::string h = "run_id,iter,f_estimate,grad_norm,error_metric";
  for (int i = 0; i < charges; ++i) h += fmt::format(",mu_{}", i);
  h += ",shots_used\n";
  return h;
}

std::string trace_rows(const ExperimentOutcome& outcome, const std::string& prefix) {
  std::string out;
  for (std::size_t r = 0; r < outcome.traces.size(); ++r) {
    for (const auto& rec : outcome.traces[r].records) {
      out += prefix;
      out += fmt::format("{},{},{},{},{}", r, rec.iter, format_double(rec.f_estimate), format_double(rec.grad_norm),
                         format_double(rec.error_metric));
      for (Eigen::Index i = 0; i < rec.mu.size(); ++i) out += "," + format_double(rec.mu(i));
      out += fmt::format(",{}\n", rec.shots);
    }
  }
  return out;
}

ordered_json json_number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

ordered_json json_vector(const Vector& v) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(json_number(v(i)));
  return a;
}

}  // namespace

int ExperimentConfig::resolve_repetitions() const {
  if (repetitions) return *repetitions;
  return is_hqc_config(*this) ? 5 : 1;
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("malformed JSON: {}", e.what()));
  }
  check_keys(j, {"name", "model", "solver", "oracle", "repetitions", "seed", "sweep", "output"}, "config");
  ExperimentConfig c;
  if (j.contains("name")) c.name = get_string(j["name"], "config", "name");
  if (j.contains("model")) c.model = parse_model(j["model"]);
  if (j.contains("solver")) c.solver = parse_solver(j["solver"]);
  if (j.contains("oracle")) c.oracle = parse_oracle(j["oracle"]);
  if (j.contains("repetitions")) c.repetitions = get_int(j["repetitions"], "config", "repetitions");
  if (j.contains("seed")) {
    const json& s = j["seed"];
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
      type_error("config", "seed", "a non-negative integer");
    }
    c.seed = s.get<std::uint64_t>();
  }
  if (j.contains("sweep")) c.sweep = parse_sweep(j["sweep"]);
  if (j.contains("output")) c.output = get_string(j["output"], "config", "output");
  validate_config(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) { return parse_config(read_file(path)); }

std::string config_to_json(const ExperimentConfig& c) {
  ordered_json j;
  j["name"] = c.name;
  ordered_json m;
  m["type"] = c.model.type;
  m["geometry"] = c.model.geometry;
  m["n"] = c.model.n;
  m["rows"] = c.model.rows;
  m["cols"] = c.model.cols;
  m["nnn"] = c.model.nnn;
  m["J"] = c.model.J;
  m["lambda"] = c.model.lambda;
  m["targets"] = c.model.targets;
  m["code"] = c.model.code;
  m["charges"] = ordered_json::array();
  for (const auto& ch : c.model.charges) m["charges"].push_back({{"word", ch.word}, {"target", ch.target}});
  put_optional(m, "bloch", c.model.bloch);
  m["gammas"] = c.model.gammas;
  j["model"] = m;
  ordered_json s;
  s["variant"] = c.solver.variant;
  s["epsilon"] = c.solver.epsilon;
  put_optional(s, "temperature", c.solver.temperature);
  put_optional(s, "eta", c.solver.eta);
  put_optional(s, "delta", c.solver.delta);
  s["max_iter"] = c.solver.max_iter;
  put_optional(s, "nesterov", c.solver.nesterov);
  s["backtrack_factor"] = c.solver.backtrack_factor;
  put_optional(s, "hessian_regularization_floor", c.solver.hessian_regularization_floor);
  s["max_backtracks"] = c.solver.max_backtracks;
  s["shots_per_iteration"] = c.solver.shots_per_iteration;
  s["hessian_time_samples"] = c.solver.hessian_time_samples;
  s["hessian_shots"] = c.solver.hessian_shots;
  s["hessian_mode"] = c.solver.hessian_mode;
  s["warm_start"] = c.solver.warm_start;
  j["solver"] = s;
  j["oracle"] = {{"enabled", c.oracle.enabled}, {"iterations", c.oracle.iterations}, {"tolerance", c.oracle.tolerance}};
  put_optional(j, "repetitions", c.repetitions);
  j["seed"] = c.seed;
  if (c.sweep) j["sweep"] = {{"parameter", c.sweep->parameter}, {"values", c.sweep->values}};
  put_optional(j, "output", c.output);
  return j.dump(2) + "\n";
}

BuiltModel build_model(const ModelConfig& model) {
  BuiltModel built;
  if (model.type == "heisenberg") {
    HeisenbergSpec spec;
    if (model.geometry == "line") {
      spec.geometry = Geometry::kLine;
    } else if (model.geometry == "grid") {
      spec.geometry = Geometry::kGrid;
    } else {
      throw ConfigError(fmt::format("unknown geometry '{}'", model.geometry));
    }
    spec.n = model.n;
    spec.rows = model.rows;
    spec.cols = model.cols;
    spec.nnn = model.nnn;
    spec.J = model.J;
    spec.lambda = model.lambda;
    built.system = build_heisenberg(spec, model.targets);
    return built;
  }
  if (model.type != "stabilizer") throw ConfigError(fmt::format("unknown model type '{}'", model.type));
  const StabilizerCode code = builtin_code(model.code);
  std::vector<ChargeSpec> charges;
  if (model.bloch) {
    if (!model.charges.empty()) throw ConfigError("model.bloch and model.charges are mutually exclusive");
    if (code.k != 1) throw ConfigError("model.bloch needs a code with one logical qubit");
    if (model.bloch->size() != 3) throw ConfigError("model.bloch needs three components");
    const BlochVector r((*model.bloch)[0], (*model.bloch)[1], (*model.bloch)[2]);
    for (int d = 1; d <= 3; ++d) charges.push_back({{d}, r(d - 1)});
    built.logical_target = LogicalTarget::from_bloch(r);
  } else {
    if (model.charges.empty()) throw ConfigError("stabilizer model needs charges or bloch");
    std::set<std::vector<int>> seen;
    LogicalTarget target = LogicalTarget::maximally_mixed(code.k);
    for (const auto& c : model.charges) {
      std::vector<int> word = parse_logical_word(c.word, code.k);
      if (!seen.insert(word).second) throw ConfigError(fmt::format("duplicate charge word '{}'", c.word));
      if (std::all_of(word.begin(), word.end(), [](int d) { return d == 0; })) {
        throw ConfigError("charge word must not be the logical identity");
      }
      target.set(word, c.target);
      charges.push_back({word, c.target});
    }
    const std::size_t full = all_logical_words(code.k).size() - 1;
    if (seen.size() == full) built.logical_target = target;
  }
  built.system = build_stabilizer_system(code, charges, model.gammas);
  built.code = code;
  return built;
}

OptimizerConfig optimizer_config(const ExperimentConfig& config, const BuiltModel& model) {
  const SolverConfig& s = config.solver;
  OptimizerConfig oc;
  oc.variant = parse_variant(s.variant);
  oc.epsilon = s.epsilon;
  oc.temperature = s.temperature;
  oc.eta = s.eta;
  oc.delta = s.delta;
  oc.max_iter = s.max_iter;
  oc.nesterov = s.nesterov;
  oc.backtrack_factor = s.backtrack_factor;
  oc.hessian_regularization_floor = s.hessian_regularization_floor;
  oc.max_backtracks = s.max_backtracks;
  oc.seed = config.seed;
  if (s.warm_start != "none") {
    if (!model.code || !model.logical_target || model.code->k != 1) {
      throw ConfigError("warm_start needs a one-logical-qubit stabilizer model with a full logical target");
    }
    const LogicalTarget& t = *model.logical_target;
    const BlochVector r(t.coefficient({1}), t.coefficient({2}), t.coefficient({3}));
    const WarmStartVariant variant = s.warm_start == "signed" ? WarmStartVariant::kSigned
                                                               : WarmStartVariant::kNormalized;
    const WarmStartResult ws = warm_start_state(*model.code, r, oc.resolve_temperature(model.system), variant);
    const std::vector<int> digits = single_digit_words(config.model, 1);
    Vector mu(model.system.num_charges());
    for (int i = 0; i < mu.size(); ++i) mu(i) = ws.warm.chemical_potential(digits[i] - 1);
    oc.initial_mu = mu;
  }
  return oc;
}

std::uint64_t repetition_seed(std::uint64_t seed, int repetition) {
  return splitmix64(splitmix64(seed) + static_cast<std::uint64_t>(repetition));
}

ExperimentOutcome execute(const ExperimentConfig& config, int workers) {
  const auto start = std::chrono::steady_clock::now();
  validate_config(config);
  if (workers <= 0) throw ConfigError("workers must be positive");
  ExperimentOutcome outcome;
  outcome.config = config;
  outcome.model = build_model(config.model);
  const ThermoSystem& system = outcome.model.system;
  const Vector q = system.target_vector();
  const OptimizerConfig base = optimizer_config(config, outcome.model);

  std::optional<double> reference;
  if (config.oracle.enabled) {
    DualSolveOptions opts;
    opts.iterations = config.oracle.iterations;
    opts.tolerance = config.oracle.tolerance;
    outcome.oracle = dual_eigenvalue_solve(system, q, opts);
    reference = outcome.oracle->value;
  }

  HessianSampling sampling;
  sampling.time_samples = config.solver.hessian_time_samples;
  sampling.shots = config.solver.hessian_shots;
  sampling.mode = config.solver.hessian_mode == "extensive" ? PhiMode::kExtensive : PhiMode::kGeneric;

  std::optional<Matrix> encoded;
  if (outcome.model.code && outcome.model.logical_target) {
    encoded = encoded_state(*outcome.model.code, *outcome.model.logical_target);
  }

  const int reps = config.resolve_repetitions();
  outcome.traces.resize(reps);
  outcome.fidelities.resize(reps);
  outcome.exact_errors.resize(reps);
  std::vector<std::exception_ptr> errors(reps);

  auto run_one = [&](int r) {
    try {
      OptimizerConfig oc = base;
      oc.seed = repetition_seed(config.seed, r);
      Trace tr;
      if (is_hqc(oc.variant)) {
        ShotEstimator est(oc.seed, config.solver.shots_per_iteration, sampling);
        tr = run_solver(system, q, oc, est, reference);
      } else {
        ExactEstimator est;
        tr = run_solver(system, q, oc, est, reference);
      }
      if (encoded || reference) {
        const ThermalState st = thermal_state(system, tr.final_mu, tr.temperature);
        if (encoded) outcome.fidelities[r] = fidelity(*encoded, st.rho);
        if (reference) {
          const Vector g = gradient(system, st, q);
          const double energy = expectation(system.hamiltonian, st.rho) + tr.final_mu.dot(g);
          outcome.exact_errors[r] = error_metric(*reference, energy, g);
        }
      }
      outcome.traces[r] = std::move(tr);
    } catch (...) {
      errors[r] = std::current_exception();
    }
  };

  const int threads = std::min(workers, reps);
  if (threads <= 1) {
    for (int r = 0; r < reps; ++r) run_one(r);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (int r = next++; r < reps; r = next++) run_one(r);
      });
    }
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  outcome.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return outcome;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", x);
}

std::string trace_csv(const ExperimentOutcome& outcome) {
  return header_columns(outcome.model.system.num_charges()) + trace_rows(outcome, "");
}

std::string aggregate_csv(const ExperimentOutcome& outcome) {
  std::string out =
      "iter,runs,f_estimate_mean,f_estimate_std,grad_norm_mean,grad_norm_std,error_metric_mean,error_metric_std\n";
  std::size_t longest = 0;
  for (const auto& tr : outcome.traces) longest = std::max(longest, tr.records.size());
  for (std::size_t i = 0; i < longest; ++i) {
    std::vector<const IterationRecord*> rows;
    for (const auto& tr : outcome.traces) {
      if (i < tr.records.size()) rows.push_back(&tr.records[i]);
    }
    auto stats = [&](auto field) {
      double mean = 0.0;
      for (const auto* r : rows) mean += field(*r);
      mean /= static_cast<double>(rows.size());
      double var = 0.0;
      for (const auto* r : rows) var += (field(*r) - mean) * (field(*r) - mean);
      const double sd = rows.size() > 1 ? std::sqrt(var / static_cast<double>(rows.size() - 1)) : 0.0;
      return format_double(mean) + "," + format_double(sd);
    };
    out += fmt::format("{},{},{},{},{}\n", rows.front()->iter, rows.size(),
                       stats([](const IterationRecord& r) { return r.f_estimate; }),
                       stats([](const IterationRecord& r) { return r.grad_norm; }),
                       stats([](const IterationRecord& r) { return r.error_metric; }));
  }
  return out;
}

std::string summary_json(const ExperimentOutcome& outcome) {
  const ExperimentConfig& c = outcome.config;
  ordered_json j;
  j["schema_version"] = kSummarySchemaVersion;
  j["name"] = c.name;
  j["model"] = outcome.model.system.label;
  j["variant"] = c.solver.variant;
  j["seed"] = c.seed;
  j["repetitions"] = outcome.traces.size();
  if (!outcome.traces.empty()) {
    const Trace& t0 = outcome.traces.front();
    j["temperature"] = json_number(t0.temperature);
    j["smoothness"] = json_number(t0.smoothness);
    j["eta"] = json_number(t0.eta);
    j["delta"] = json_number(t0.delta);
  }
  if (outcome.oracle) {
    const DualSolution& d = *outcome.oracle;
    j["reference"] = {{"value", json_number(d.value)},
                      {"mu_star", json_vector(d.mu_star)},
                      {"gap_bound", json_number(d.gap_bound)},
                      {"ground_multiplicity", d.ground_multiplicity},
                      {"low_confidence", d.low_confidence}};
  } else {
    j["reference"] = nullptr;
  }
  ordered_json runs = ordered_json::array();
  for (std::size_t r = 0; r < outcome.traces.size(); ++r) {
    const Trace& t = outcome.traces[r];
    ordered_json run;
    run["run_id"] = r;
    run["seed"] = repetition_seed(c.seed, static_cast<int>(r));
    run["converged"] = t.converged;
    run["iterations"] = t.iterations;
    run["output"] = json_number(t.output);
    run["final_error_metric"] = t.records.empty() ? nullptr : json_number(t.records.back().error_metric);
    run["final_exact_error_metric"] =
        outcome.exact_errors[r] ? json_number(*outcome.exact_errors[r]) : ordered_json(nullptr);
    run["final_grad_norm"] = t.records.empty() ? nullptr : json_number(t.records.back().grad_norm);
    run["fallbacks"] = t.fallbacks;
    run["total_shots"] = t.total_shots;
    run["final_mu"] = json_vector(t.final_mu);
    run["fidelity"] = outcome.fidelities[r] ? json_number(*outcome.fidelities[r]) : ordered_json(nullptr);
    runs.push_back(run);
  }
  j["runs"] = runs;
  j["all_converged"] = all_converged(outcome);
  j["wall_seconds"] = outcome.wall_seconds;
  return j.dump(2) + "\n";
}

bool all_converged(const ExperimentOutcome& outcome) {
  return std::all_of(outcome.traces.begin(), outcome.traces.end(), [](const Trace& t) { return t.converged; });
}

int run_command(const std::string& config_path, const CommandOptions& options) {
  return guarded([&] {
    ExperimentConfig config = load_config(config_path);
    if (options.seed) config.seed = *options.seed;
    const ExperimentOutcome outcome = execute(config, options.workers);
    std::vector<std::pair<std::string, std::string>> files = {
        {"config.json", config_to_json(config)},
        {"trace.csv", trace_csv(outcome)},
        {"summary.json", summary_json(outcome)},
    };
    if (outcome.traces.size() > 1) files.push_back({"aggregate.csv", aggregate_csv(outcome)});
    const fs::path dir = resolve_out_dir(config, options);
    write_artifacts(dir, files);
    for (std::size_t r = 0; r < outcome.traces.size(); ++r) {
      const Trace& t = outcome.traces[r];
      std::cout << fmt::format("run {}: converged={} iterations={} output={}", r, t.converged, t.iterations,
                               format_double(t.output));
      if (outcome.oracle) std::cout << " reference=" << format_double(outcome.oracle->value);
      std::cout << '\n';
    }
    std::cout << "artifacts written to " << dir.string() << '\n';
    if (options.strict && !all_converged(outcome)) return kExitNotConverged;
    return kExitOk;
  });
}

int sweep_command(const std::string& config_path, const std::optional<std::string>& parameter,
                  const std::vector<double>& values, const CommandOptions& options) {
  return guarded([&] {
    ExperimentConfig config = load_config(config_path);
    if (options.seed) config.seed = *options.seed;
    SweepConfig sweep = config.sweep.value_or(SweepConfig{});
    if (parameter) sweep.parameter = *parameter;
    if (!values.empty()) sweep.values = values;
    if (sweep.parameter != "T" && sweep.parameter != "shots" && sweep.parameter != "eta") {
      throw ConfigError(fmt::format("unknown sweep parameter '{}'", sweep.parameter));
    }
    if (sweep.values.empty()) throw ConfigError("sweep needs at least one value");

    const int charges = build_model(config.model).system.num_charges();
    std::string combined = "value," + header_columns(charges);
    std::string summary =
        "value,status,run_id,converged,iterations,output,reference,final_error_metric,final_exact_error_metric,fidelity,"
        "total_shots\n";
    bool every_converged = true;
    for (double v : sweep.values) {
      ExperimentConfig cfg = config;
      cfg.sweep.reset();
      if (sweep.parameter == "T") {
        cfg.solver.temperature = v;
      } else if (sweep.parameter == "eta") {
        cfg.solver.eta = v;
      } else {
        if (v < 1.0 || v != std::floor(v)) throw ConfigError("shots sweep values must be positive integers");
        cfg.solver.shots_per_iteration = static_cast<std::int64_t>(v);
      }
      const std::string value = format_double(v);
      std::optional<ExperimentOutcome> outcome;
      try {
        outcome = execute(cfg, options.workers);
      } catch (const ContractError& e) {
        summary += value + ",rejected,,,,,,,,,\n";
        std::cout << "value " << value << ": rejected (" << e.what() << ")\n";
        every_converged = false;
        continue;
      }
      combined += trace_rows(*outcome, value + ",");
      for (std::size_t r = 0; r < outcome->traces.size(); ++r) {
        const Trace& t = outcome->traces[r];
        every_converged = every_converged && t.converged;
        summary += fmt::format(
            "{},{},{},{},{},{},{},{},{},{},{}\n", value, t.converged ? "converged" : "not_converged", r,
            t.converged ? 1 : 0, t.iterations, format_double(t.output),
            outcome->oracle ? format_double(outcome->oracle->value) : "",
            t.records.empty() ? "" : format_double(t.records.back().error_metric),
            outcome->exact_errors[r] ? format_double(*outcome->exact_errors[r]) : "",
            outcome->fidelities[r] ? format_double(*outcome->fidelities[r]) : "", t.total_shots);
      }
      std::cout << "value " << value << ": " << (all_converged(*outcome) ? "converged" : "not converged") << '\n';
    }
    ExperimentConfig echoed = config;
    echoed.sweep = sweep;
    const fs::path dir = resolve_out_dir(config, options);
    write_artifacts(dir, {{"config.json", config_to_json(echoed)},
                          {"sweep.csv", combined},
                          {"sweep_summary.csv", summary}});
    std::cout << "artifacts written to " << dir.string() << '\n';
    if (options.strict && !every_converged) return kExitNotConverged;
    return kExitOk;
  });
}

int verify_command(const std::string& suite, const CommandOptions& options) {
  return guarded([&] {
    std::vector<std::string> suites;
    if (suite == "all") {
      suites = {"formulas", "gradients", "codes"};
    } else {
      suites = {suite};
    }
    bool ok = true;
    ordered_json reports = ordered_json::array();
    for (const auto& s : suites) {
      const VerifyReport report = run_verify_suite(s, options.seed.value_or(7));
      ordered_json checks = ordered_json::array();
      for (const auto& c : report.checks) {
        std::cout << fmt::format("[{}] {}/{}: max_error={:.3e} tolerance={:.1e}{}\n", c.passed ? "PASS" : "FAIL", s,
                                 c.name, c.max_error, c.tolerance, c.detail.empty() ? "" : " (" + c.detail + ")");
        checks.push_back({{"name", c.name},
                          {"passed", c.passed},
                          {"max_error", json_number(c.max_error)},
                          {"tolerance", c.tolerance},
                          {"detail", c.detail}});
      }
      ok = ok && report.passed();
      reports.push_back({{"suite", s}, {"passed", report.passed()}, {"checks", checks}});
    }
    if (options.out_dir) {
      ordered_json j;
      j["schema_version"] = kSummarySchemaVersion;
      j["passed"] = ok;
      j["suites"] = reports;
      write_artifacts(*options.out_dir, {{"verify.json", j.dump(2) + "\n"}});
    }
    std::cout << (ok ? "verify: all checks passed\n" : "verify: FAILED\n");
    return ok ? kExitOk : kExitNumerical;
  });
}

}  // namespace qthermo
