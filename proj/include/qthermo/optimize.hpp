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

#ifndef QTHERMO_OPTIMIZE_HPP_
#define QTHERMO_OPTIMIZE_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qthermo/estimator.hpp"
#include "qthermo/models.hpp"

namespace qthermo {

enum class Variant { kFirstClassical, kSecondClassical, kFirstHqc, kSecondHqc };

std::string variant_name(Variant v);
Variant parse_variant(std::string_view name);
bool is_second_order(Variant v);
bool is_hqc(Variant v);

struct OptimizerConfig {
  Variant variant = Variant::kFirstClassical;
  double epsilon = 0.1;                    // sets T = epsilon / (n ln 2)
  std::optional<double> temperature;       // overrides epsilon when set
  std::optional<double> eta;               // first order: 0.9/L, second order: 1
  std::optional<double> delta;             // 1e-4 exact, 1e-2 shot-based
  int max_iter = 20000;
  std::optional<bool> nesterov;            // first_classical: on, first_hqc: off
  double backtrack_factor = 0.5;
  std::optional<double> hessian_regularization_floor;  // default 1e-6 L
  int max_backtracks = 40;
  std::uint64_t seed = 0;
  std::optional<Vector> initial_mu;

  double resolve_temperature(const ThermoSystem& system) const;
  double resolve_delta(bool exact_estimator) const;
  bool resolve_nesterov() const;
};

struct IterationRecord {
  int iter = 0;
  Vector mu;
  // mu.q + <H>~ - mu.<Q>~ at the evaluated point.
  double f_estimate = 0.0;
  double grad_norm = 0.0;
  double error_metric = 0.0;  // NaN without a reference value
  double step_size = 0.0;     // step that produced this point (0 at iter 0)
  std::int64_t shots = 0;     // shots consumed by this iteration
  bool fallback = false;      // gradient step used instead of a Newton step
};

struct Trace {
  std::vector<IterationRecord> records;
  double output = 0.0;
  bool converged = false;
  int iterations = 0;
  int fallbacks = 0;
  double temperature = 0.0;
  double smoothness = 0.0;
  double eta = 0.0;
  double delta = 0.0;
  std::int64_t total_shots = 0;
  Vector final_mu;
};

// |E_ref - f_estimate| + ||grad||_2
double error_metric(double e_ref, double f_estimate, const Vector& grad);

Trace run_first_order(const ThermoSystem& system, const Vector& q, const OptimizerConfig& config,
                      const Estimator& estimator, std::optional<double> reference = std::nullopt);
Trace run_second_order(const ThermoSystem& system, const Vector& q, const OptimizerConfig& config,
                       const Estimator& estimator, std::optional<double> reference = std::nullopt);
// Dispatches on config.variant.
Trace run_solver(const ThermoSystem& system, const Vector& q, const OptimizerConfig& config,
                 const Estimator& estimator, std::optional<double> reference = std::nullopt);

}  // namespace qthermo

#endif  // QTHERMO_OPTIMIZE_HPP_
