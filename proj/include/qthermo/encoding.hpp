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

#ifndef QTHERMO_ENCODING_HPP_
#define QTHERMO_ENCODING_HPP_

#include <vector>

#include "qthermo/models.hpp"
#include "qthermo/operators.hpp"

namespace qthermo {

using BlochVector = Eigen::Vector3d;

// Radial shrink applied to pure targets before exponential encoding.
inline constexpr double kPureShrink = 1.0 - 1e-6;

/**
 * @brief Pauli coefficients r_w of a k-qubit state rho = 2^-k sum_w r_w sigma_w.
 *
 * Coefficients are indexed like all_logical_words(k); r_0 = 1 always.
 */
struct LogicalTarget {
  int k = 1;
  std::vector<double> coefficients;

  static LogicalTarget from_bloch(const BlochVector& r);
  static LogicalTarget maximally_mixed(int k);
  // (I I + X X - Y Y + Z Z) / 4 scaled by `strength` on the correlated terms.
  static LogicalTarget bell(double strength = 1.0);

  double coefficient(const std::vector<int>& word) const;
  void set(const std::vector<int>& word, double value);
  // The k-qubit density matrix; checked to be PSD with unit trace.
  Matrix matrix() const;
};

struct ExponentialCoords {
  Eigen::Vector3d mu;
  double beta;
};

// mu = r, beta = arctanh(-|r|)/|r| (beta = -1 at r = 0). Requires |r| < 1.
ExponentialCoords mixture_to_exponential(const BlochVector& r);
// mu = -r/|r|, beta = arctanh(|r|) >= 0.
ExponentialCoords mixture_to_exponential_normalized(const BlochVector& r);
// r = tanh(-beta |mu|) mu/|mu|, which is tanh(-beta) mu for unit mu.
BlochVector exponential_to_mixture(const Eigen::Vector3d& mu, double beta);

enum class WarmStartVariant { kSigned, kNormalized };

struct WarmStart {
  ExponentialCoords coords;
  // Chemical potentials for the charges (X, Y, Z logical): -beta T mu.
  Vector chemical_potential;
};

struct WarmStartResult {
  Matrix rho;
  WarmStart warm;
};

// Stabilizer system with charges (X, Y, Z logical) and Bloch targets r. Requires k = 1.
ThermoSystem logical_bloch_system(const StabilizerCode& code, const BlochVector& r);

// exp(-(H + beta T mu.L)/T)/Z with (mu, beta) from the chosen map.
WarmStartResult warm_start_state(const StabilizerCode& code, const BlochVector& r, double temperature,
                                 WarmStartVariant variant = WarmStartVariant::kSigned);

struct ExponentialLogicalState {
  Matrix rho;
  // mu_w = Tr[sigma_w ln rho_L] / 2^k for every word, identity included.
  std::vector<double> log_coefficients;
};

// exp(-(H - T sum_w mu_w sigma_w)/T)/Z for a full-rank logical target.
ExponentialLogicalState exponential_logical_state(const StabilizerCode& code, const LogicalTarget& target, double temperature);

// Stabilizer system whose charges are all non-identity logical words with
// targets from `target`.
ThermoSystem logical_target_system(const StabilizerCode& code, const LogicalTarget& target);

// Pi_C (2^-k sum_w r_w sigma_w) Pi_C normalized to unit trace.
Matrix encoded_state(const StabilizerCode& code, const LogicalTarget& target);

// Tr[sigma_w rho] for all words in all_logical_words(k) order.
std::vector<double> logical_expectations(const StabilizerCode& code, const Matrix& rho);

}  // namespace qthermo

#endif  // QTHERMO_ENCODING_HPP_
