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

#ifndef QTHERMO_ORACLE_HPP_
#define QTHERMO_ORACLE_HPP_

#include <vector>

#include "qthermo/models.hpp"
#include "qthermo/operators.hpp"

namespace qthermo {

struct DualSolution {
  Vector mu_star;
  // mu*.q + lambda_min(H - mu*.Q)
  double value = 0.0;
  int ground_multiplicity = 1;
  Matrix ground_projector;
  // Central-path duality gap tau * d of the barrier stage (infinite if the
  // barrier stage did not run or failed).
  double gap_bound = 0.0;
  bool low_confidence = false;
  int iterations = 0;
};

struct DualSolveOptions {
  int iterations = 2000;        // supergradient steps
  double tolerance = 1e-9;      // target duality gap for the barrier stage
  double step0 = 1.0;           // eta_m = step0 / sqrt(m)
  int patience = 500;           // supergradient steps without improvement
  double degeneracy_tol = 1e-6;
  bool barrier_polish = true;
};

// g(mu) = mu.q + lambda_min(H - mu.Q)
double dual_value(const ThermoSystem& system, const Vector& q, const Vector& mu);

/**
 * @brief Reference value of min Tr[H rho] subject to Tr[Q_i rho] = q_i.
 *
 * Maximizes the concave dual g by supergradient ascent with Polyak
 * averaging, then refines the best point with a log-barrier Newton method on
 * the epigraph form max mu.q + s subject to H - mu.Q - s I > 0.
 */
DualSolution dual_eigenvalue_solve(const ThermoSystem& system, const Vector& q,
                                   const DualSolveOptions& options = {});

struct RenyiValues {
  double petz = 0.0;
  double sandwiched = 0.0;
  double geometric = 0.0;
};

struct ClosenessMetrics {
  // Direct matrix computations between rho_beta and Pi_1 / d_G.
  double trace_distance = 0.0;
  double fidelity = 0.0;
  double relative_entropy = 0.0;  // D(Pi_1/d_G || rho_beta)
  std::vector<double> alphas;
  std::vector<RenyiValues> renyi;
  // Closed forms in terms of the spectral data.
  double trace_distance_closed = 0.0;
  double fidelity_closed = 0.0;
  double relative_entropy_closed = 0.0;
  // Bounds in terms of the gap.
  double trace_distance_bound = 0.0;
  double fidelity_bound = 0.0;
  int ground_dimension = 0;
  double gap = 0.0;
  bool degenerate_spectrum = false;
};

ClosenessMetrics closeness_metrics(const Matrix& h, double beta, const std::vector<double>& alphas = {0.5, 2.0, 3.0},
                                   double degeneracy_tol = 1e-9);

// Inverse temperature that guarantees trace distance <= eps (resp. relative
// entropy <= eps) to the ground-space maximally mixed state.
double beta_for_trace_distance(double eps, double gap, int dimension, int ground_dimension);
double beta_for_relative_entropy(double eps, double gap, int dimension, int ground_dimension);

// |Tr[(H - mu*.Q) rho] - lambda_min(H - mu*.Q)|
double complementary_slackness_residual(const ThermoSystem& system, const DualSolution& dual,
                                        const Matrix& rho);

// Matrix function helpers on Hermitian matrices (eigenvalue-wise).
Matrix matrix_power(const Matrix& a, double power, double zero_tol = 1e-14);
Matrix matrix_log(const Matrix& a);
Matrix matrix_sqrt(const Matrix& a);
double trace_norm(const Matrix& a);
// ||sqrt(a) sqrt(b)||_1^2
double fidelity(const Matrix& a, const Matrix& b);
// Tr[a (ln a - ln b)], with supp(a) inside supp(b)
double relative_entropy(const Matrix& a, const Matrix& b);

}  // namespace qthermo

#endif  // QTHERMO_ORACLE_HPP_
