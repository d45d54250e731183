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

#include "qthermo/optimize.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "qthermo/error.hpp"
#include "qthermo/gibbs.hpp"

namespace qthermo {
namespace {

constexpr double kDefaultFirstOrderFraction = 0.9;
constexpr double kArmijo = 1e-4;

// Estimates at one point of the chemical-potential space.
struct Evaluation {
  ThermalState state;
  Vector grad;
  double energy = 0.0;
  std::int64_t shots = 0;
};

Evaluation evaluate(const ThermoSystem& system, const Vector& q, const Vector& mu, double temperature,
                    const Estimator& estimator, std::uint64_t iteration, std::uint64_t block) {
  Evaluation ev;
  ev.state = thermal_state(system, mu, temperature);
  const int c = system.num_charges();
  Vector qt(c);
  for (int i = 0; i < c; ++i) {
    Estimate e = estimator.expectation(system, ev.state, i + 1, iteration, block);
    qt(i) = e.value;
    ev.shots += e.shots;
  }
  Estimate h = estimator.expectation(system, ev.state, 0, iteration, block);
  ev.shots += h.shots;
  ev.grad = q - qt;
  ev.energy = mu.dot(q) + h.value - mu.dot(qt);
  return ev;
}

IterationRecord make_record(int iter, const Vector& mu, const Evaluation& ev, std::optional<double> reference,
                            double step, std::int64_t shots) {
  IterationRecord r;
  r.iter = iter;
  r.mu = mu;
  r.f_estimate = ev.energy;
  r.grad_norm = ev.grad.norm();
  r.error_metric = reference ? error_metric(*reference, ev.energy, ev.grad)
                             : std::numeric_limits<double>::quiet_NaN();
  r.step_size = step;
  r.shots = shots;
  return r;
}

Trace start_trace(const ThermoSystem& system, const Vector& q, const OptimizerConfig& config,
                  const Estimator& estimator) {
  if (q.size() != system.num_charges()) throw ContractError("target length differs from charge count");
  if (is_hqc(config.variant) == estimator.exact()) {
    throw ContractError(fmt::format("variant {} used with a mismatched estimator", variant_name(config.variant)));
  }
  if (config.max_iter < 0) throw ConfigError("max_iter must be non-negative");
  Trace tr;
  tr.temperature = config.resolve_temperature(system);
  tr.smoothness = smoothness_L(system, tr.temperature);
  tr.delta = config.resolve_delta(estimator.exact());
  if (!(tr.delta > 0.0)) throw ConfigError("delta must be positive");
  return tr;
}

Vector initial_point(const ThermoSystem& system, const OptimizerConfig& config) {
  if (!config.initial_mu) return Vector::Zero(system.num_charges());
  if (config.initial_mu->size() != system.num_charges()) {
    throw ConfigError("initial mu length differs from charge count");
  }
  return *config.initial_mu;
}

}  // namespace

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::kFirstClassical: return "first_classical";
    case Variant::kSecondClassical: return "second_classical";
    case Variant::kFirstHqc: return "first_hqc";
    case Variant::kSecondHqc: return "second_hqc";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  for (Variant v : {Variant::kFirstClassical, Variant::kSecondClassical, Variant::kFirstHqc, Variant::kSecondHqc}) {
    if (variant_name(v) == name) return v;
  }
  throw ConfigError(fmt::format("unknown solver variant '{}'", name));
}

bool is_second_order(Variant v) { return v == Variant::kSecondClassical || v == Variant::kSecondHqc; }
bool is_hqc(Variant v) { return v == Variant::kFirstHqc || v == Variant::kSecondHqc; }

double OptimizerConfig::resolve_temperature(const ThermoSystem& system) const {
  if (temperature) {
    if (!(*temperature > 0.0)) throw ConfigError("temperature must be positive");
    return *temperature;
  }
  return temperature_for_epsilon(epsilon, system.num_qubits());
}

double OptimizerConfig::resolve_delta(bool exact_estimator) const {
  if (delta) return *delta;
  return exact_estimator ? 1e-4 : 1e-2;
}

bool OptimizerConfig::resolve_nesterov() const {
  if (nesterov) return *nesterov;
  return variant == Variant::kFirstClassical;
}

double error_metric(double e_ref, double f_estimate, const Vector& grad) {
  return std::abs(e_ref - f_estimate) + grad.norm();
}

Trace run_first_order(const ThermoSystem& system, const Vector& q, const OptimizerConfig& config,
                      const Estimator& estimator, std::optional<double> reference) {
  if (is_second_order(config.variant)) throw ContractError("run_first_order needs a first-order variant");
  Trace tr = start_trace(system, q, config, estimator);
  const double temp = tr.temperature;
  tr.eta = config.eta ? *config.eta : kDefaultFirstOrderFraction / tr.smoothness;
  if (!(tr.eta > 0.0)) throw ConfigError("eta must be positive");
  if (config.variant == Variant::kFirstClassical && !(tr.eta < 1.0 / tr.smoothness)) {
    throw ContractError(fmt::format("step size {} is not below 1/L = {}", tr.eta, 1.0 / tr.smoothness));
  }
  const bool nesterov = config.resolve_nesterov();

  Vector mu = initial_point(system, config);
  Vector prev = mu;
  for (int m = 0; m <= config.max_iter; ++m) {
    Vector y = mu;
    if (nesterov && m > 0) y = mu + (static_cast<double>(m - 1) / static_cast<double>(m + 2)) * (mu - prev);
    Evaluation ev = evaluate(system, q, y, temp, estimator, static_cast<std::uint64_t>(m), 0);
    tr.records.push_back(make_record(m, y, ev, reference, m == 0 ? 0.0 : tr.eta, ev.shots));
    tr.total_shots += ev.shots;
    tr.output = ev.energy;
    tr.final_mu = y;
    tr.iterations = m;
    if (ev.grad.norm() <= tr.delta) {
      tr.converged = true;
      break;
    }
    prev = mu;
    mu = y + tr.eta * ev.grad;
  }
  return tr;
}

Trace run_second_order(const ThermoSystem& system, const Vector& q, const OptimizerConfig& config,
                       const Estimator& estimator, std::optional<double> reference) {
  if (!is_second_order(config.variant)) throw ContractError("run_second_order needs a second-order variant");
  if (!(config.backtrack_factor > 0.0 && config.backtrack_factor < 1.0)) {
    throw ConfigError("backtrack_factor must lie in (0, 1)");
  }
  Trace tr = start_trace(system, q, config, estimator);
  const double temp = tr.temperature;
  const int c = system.num_charges();
  const double eta0 = config.eta ? *config.eta : 1.0;
  if (!(eta0 > 0.0)) throw ConfigError("eta must be positive");
  tr.eta = eta0;
  const double zeta0 =
      config.hessian_regularization_floor ? *config.hessian_regularization_floor : 1e-6 * tr.smoothness;
  if (zeta0 < 0.0) throw ConfigError("hessian_regularization_floor must be non-negative");
  const double safe_step = kDefaultFirstOrderFraction / tr.smoothness;
  const bool classical = estimator.exact();

  Vector mu = initial_point(system, config);
  Evaluation cur = evaluate(system, q, mu, temp, estimator, 0, 0);
  tr.records.push_back(make_record(0, mu, cur, reference, 0.0, cur.shots));
  tr.total_shots += cur.shots;
  double eta = eta0;
  int successes = 0;
  int m = 0;
  while (true) {
    tr.output = cur.energy;
    tr.final_mu = mu;
    tr.iterations = m;
    const double gnorm = cur.grad.norm();
    if (gnorm <= tr.delta) {
      tr.converged = true;
      break;
    }
    if (m >= config.max_iter) break;
    ++m;
    const auto iter = static_cast<std::uint64_t>(m);
    std::int64_t shots = 0;

    HessianEstimate he = estimator.hessian(system, cur.state, iter, 0);
    shots += he.shots;
    Eigen::SelfAdjointEigenSolver<RealMatrix> hes(he.value, Eigen::EigenvaluesOnly);
    const double lmax = hes.eigenvalues()(c - 1);
    const double zeta = std::max(0.0, lmax + zeta0);
    const RealMatrix reg = he.value - zeta * RealMatrix::Identity(c, c);
    Eigen::LDLT<RealMatrix> ldlt(reg);
    Vector delta_vec = ldlt.solve(cur.grad);
    bool solved = ldlt.info() == Eigen::Success && delta_vec.allFinite() &&
                  (reg * delta_vec - cur.grad).norm() <= 1e-8 * std::max(1.0, gnorm);

    bool accepted = false;
    Vector next_mu;
    Evaluation next;
    double step_used = 0.0;
    if (solved) {
      const double f_cur = classical ? objective_f(cur.state, q) : 0.0;
      // Directional derivative of f along -Delta; non-negative for NSD reg.
      const double slope = -cur.grad.dot(delta_vec);
      for (int b = 0; b < config.max_backtracks; ++b) {
        Vector trial = mu - eta * delta_vec;
        Evaluation ev = evaluate(system, q, trial, temp, estimator, iter, static_cast<std::uint64_t>(b + 1));
        shots += ev.shots;
        const double gn = ev.grad.norm();
        bool ok;
        if (classical) {
          const double f_new = objective_f(ev.state, q);
          ok = f_new >= f_cur + kArmijo * eta * slope || (gn <= gnorm && f_new >= f_cur);
        } else {
          ok = gn <= gnorm;
        }
        if (ok) {
          accepted = true;
          next_mu = std::move(trial);
          next = std::move(ev);
          step_used = eta;
          break;
        }
        eta *= config.backtrack_factor;
        successes = 0;
      }
    }
    bool fallback = false;
    if (!accepted) {
      fallback = true;
      ++tr.fallbacks;
      next_mu = mu + safe_step * cur.grad;
      next = evaluate(system, q, next_mu, temp, estimator, iter, static_cast<std::uint64_t>(config.max_backtracks + 1));
      shots += next.shots;
      step_used = safe_step;
      eta = eta0;
    }
    if (++successes >= 2) {
      eta = std::min(eta0, eta / config.backtrack_factor);
      successes = 0;
    }
    mu = std::move(next_mu);
    cur = std::move(next);
    IterationRecord rec = make_record(m, mu, cur, reference, step_used, shots);
    rec.fallback = fallback;
    tr.records.push_back(std::move(rec));
    tr.total_shots += shots;
  }
  return tr;
}

Trace run_solver(const ThermoSystem& system, const Vector& q, const OptimizerConfig& config,
                 const Estimator& estimator, std::optional<double> reference) {
  if (is_second_order(config.variant)) return run_second_order(system, q, config, estimator, reference);
  return run_first_order(system, q, config, estimator, reference);
}

}  // namespace qthermo
