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

#include "qthermo/gibbs.hpp"

#include <cmath>

#include <fmt/format.h>

#include "qthermo/error.hpp"

namespace qthermo {
namespace {

void check_temperature(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw ContractError(fmt::format("temperature {} must be positive", t));
}

void check_mu(const ThermoSystem& system, const Vector& mu) {
  if (mu.size() != system.num_charges()) {
    throw ContractError(fmt::format("mu has {} entries for {} charges", mu.size(), system.num_charges()));
  }
}

}  // namespace

SpectralDecomposition SpectralDecomposition::of(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

Matrix SpectralDecomposition::reconstruct() const {
  return vectors * values.cast<cplx>().asDiagonal() * vectors.adjoint();
}

Matrix effective_hamiltonian(const ThermoSystem& system, const Vector& mu) {
  check_mu(system, mu);
  Matrix a = system.hamiltonian.dense();
  for (int i = 0; i < system.num_charges(); ++i) a -= mu(i) * system.charges[i].dense();
  return a;
}

ThermalState thermal_state_of(const Matrix& a, double temperature) {
  check_temperature(temperature);
  ThermalState st;
  st.temperature = temperature;
  st.spectrum = SpectralDecomposition::of(a);
  const Vector& ev = st.spectrum.values;
  const Eigen::Index d = ev.size();
  const double amin = ev(0);
  // Shifted exponents are <= 0 with the ground weight exactly 1.
  Vector expo = -(ev.array() - amin) / temperature;
  Vector w(d);
  double sum = 0.0;
  for (Eigen::Index k = 0; k < d; ++k) {
    double x = std::exp(expo(k));
    w(k) = x < kWeightFloor ? 0.0 : x;
    sum += w(k);
  }
  const double log_sum = std::log(sum);
  st.log_z = -amin / temperature + log_sum;
  st.log_probs = expo.array() - log_sum;
  st.probs = w / sum;
  const Matrix& v = st.spectrum.vectors;
  st.rho = v * st.probs.cast<cplx>().asDiagonal() * v.adjoint();
  return st;
}

ThermalState thermal_state(const ThermoSystem& system, const Vector& mu, double temperature) {
  ThermalState st = thermal_state_of(effective_hamiltonian(system, mu), temperature);
  st.mu = mu;
  return st;
}

double log_partition(const ThermoSystem& system, const Vector& mu, double temperature) {
  return thermal_state(system, mu, temperature).log_z;
}

double objective_f(const ThermalState& state, const Vector& q) {
  return state.mu.dot(q) - state.temperature * state.log_z;
}

double objective_f(const ThermoSystem& system, const Vector& q, const Vector& mu, double temperature) {
  return objective_f(thermal_state(system, mu, temperature), q);
}

Vector charge_expectations(const ThermoSystem& system, const ThermalState& state) {
  Vector out(system.num_charges());
  for (int i = 0; i < system.num_charges(); ++i) out(i) = expectation(system.charges[i], state.rho);
  return out;
}

Vector gradient(const ThermoSystem& system, const ThermalState& state, const Vector& q) {
  if (q.size() != system.num_charges()) throw ContractError("target length differs from charge count");
  return q - charge_expectations(system, state);
}

Vector gradient(const ThermoSystem& system, const Vector& q, const Vector& mu, double temperature) {
  return gradient(system, thermal_state(system, mu, temperature), q);
}

double log_mean(double log_pa, double log_pb) {
  if (std::isinf(log_pa) && std::isinf(log_pb)) return 0.0;
  const double d = log_pa - log_pb;
  const double pa = std::exp(log_pa);
  const double pb = std::exp(log_pb);
  if (std::abs(d) > 1.0) return (pa - pb) / d;
  if (d == 0.0) return pa;
  // p_a - p_b = sqrt(p_a p_b) 2 sinh(d/2), accurate for small d.
  const double h = 0.5 * d;
  return std::exp(0.5 * (log_pa + log_pb)) * std::sinh(h) / h;
}

RealMatrix hessian_exact(const ThermoSystem& system, const ThermalState& state) {
  const int c = system.num_charges();
  const Matrix& v = state.spectrum.vectors;
  const Eigen::Index d = v.rows();
  std::vector<Matrix> qt(c);
  Vector mean(c);
  for (int i = 0; i < c; ++i) {
    qt[i] = v.adjoint() * system.charges[i].dense() * v;
    mean(i) = qt[i].diagonal().real().dot(state.probs);
  }
  RealMatrix lm(d, d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) lm(a, b) = log_mean(state.log_probs(a), state.log_probs(b));
  }
  RealMatrix h(c, c);
  const double inv_t = 1.0 / state.temperature;
  for (int i = 0; i < c; ++i) {
    for (int j = i; j < c; ++j) {
      // sum_ab LM_ab (Q_i)_ab (Q_j)_ba, real because both are Hermitian.
      double s = (lm.array() * (qt[i].array() * qt[j].transpose().array()).real()).sum();
      h(i, j) = -inv_t * s + inv_t * mean(i) * mean(j);
      h(j, i) = h(i, j);
    }
  }
  return h;
}

RealMatrix hessian_exact(const ThermoSystem& system, const Vector& mu, double temperature) {
  return hessian_exact(system, thermal_state(system, mu, temperature));
}

double von_neumann_entropy(const Matrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");
  double s = 0.0;
  for (double p : es.eigenvalues()) {
    if (p > kWeightFloor) s -= p * std::log(p);
  }
  return s;
}

double primal_free_energy(const ThermoSystem& system, const Matrix& rho, double temperature) {
  return expectation(system.hamiltonian, rho) - temperature * von_neumann_entropy(rho);
}

double smoothness_L(const ThermoSystem& system, double temperature) {
  check_temperature(temperature);
  double s = 0.0;
  for (const Observable& q : system.charges) {
    double norm = spectral_norm(q);
    s += norm * norm;
  }
  return 2.0 / temperature * s;
}

double temperature_for_epsilon(double epsilon, int num_qubits) {
  if (!(epsilon > 0.0)) throw ConfigError(fmt::format("epsilon {} must be positive", epsilon));
  return epsilon / (num_qubits * std::log(2.0));
}

}  // namespace qthermo
