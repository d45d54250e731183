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

#ifndef QTHERMO_GIBBS_HPP_
#define QTHERMO_GIBBS_HPP_

#include <vector>

#include "qthermo/models.hpp"
#include "qthermo/operators.hpp"

namespace qthermo {

// Boltzmann weights below this are flushed to zero before normalization.
inline constexpr double kWeightFloor = 1e-300;

struct SpectralDecomposition {
  Vector values;   // ascending
  Matrix vectors;  // columns are eigenvectors

  static SpectralDecomposition of(const Matrix& a);
  Matrix reconstruct() const;
};

/**
 * @brief Thermal state exp(-(H - mu.Q)/T)/Z with its spectral data.
 *
 * `log_probs` holds ln p_a computed without exponentiation, so it stays
 * finite even where `probs` has underflowed to zero.
 */
struct ThermalState {
  Vector mu;
  double temperature = 1.0;
  SpectralDecomposition spectrum;  // of A = H - mu.Q
  Vector probs;
  Vector log_probs;
  double log_z = 0.0;
  Matrix rho;
};

// H - mu.Q as a dense matrix.
Matrix effective_hamiltonian(const ThermoSystem& system, const Vector& mu);

ThermalState thermal_state(const ThermoSystem& system, const Vector& mu, double temperature);
// Thermal state of an arbitrary Hermitian matrix.
ThermalState thermal_state_of(const Matrix& a, double temperature);

double log_partition(const ThermoSystem& system, const Vector& mu, double temperature);

// f(mu) = mu.q - T ln Z_T(mu)
double objective_f(const ThermoSystem& system, const Vector& q, const Vector& mu, double temperature);
double objective_f(const ThermalState& state, const Vector& q);

// Tr[Q_i rho] for every charge.
Vector charge_expectations(const ThermoSystem& system, const ThermalState& state);

Vector gradient(const ThermoSystem& system, const Vector& q, const Vector& mu, double temperature);
Vector gradient(const ThermoSystem& system, const ThermalState& state, const Vector& q);

// Exact Hessian of f via the logarithmic mean of the Boltzmann weights.
RealMatrix hessian_exact(const ThermoSystem& system, const Vector& mu, double temperature);
RealMatrix hessian_exact(const ThermoSystem& system, const ThermalState& state);

// Logarithmic mean (p_a - p_b)/(ln p_a - ln p_b) from log-probabilities.
double log_mean(double log_pa, double log_pb);

double von_neumann_entropy(const Matrix& rho);
// Tr[H rho] - T S(rho)
double primal_free_energy(const ThermoSystem& system, const Matrix& rho, double temperature);

// (2/T) sum_i ||Q_i||^2
double smoothness_L(const ThermoSystem& system, double temperature);

// T = epsilon / (n ln 2)
double temperature_for_epsilon(double epsilon, int num_qubits);

}  // namespace qthermo

#endif  // QTHERMO_GIBBS_HPP_
