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

#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "qthermo/error.hpp"
#include "qthermo/gibbs.hpp"
#include "qthermo/random.hpp"
#include "test_util.hpp"

namespace qthermo {
namespace {

using testing::max_abs;
using testing::oracle_dense;

ThermoSystem single_qubit(const char* h_word, double h_coeff, std::vector<const char*> charges) {
  ThermoSystem sys;
  if (h_coeff == 0.0) {
    sys.hamiltonian = Observable(1);
  } else {
    sys.hamiltonian = Observable::from_pauli(PauliString::parse(h_word), h_coeff);
  }
  for (const char* c : charges) {
    sys.charges.push_back(Observable::from_pauli(PauliString::parse(c)));
    sys.targets.push_back(0.0);
  }
  return sys;
}

Vector random_mu(int c, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  return Vector::NullaryExpr(c, [&] { return gauss(rng); });
}

TEST(ThermalState, InfiniteTemperatureIsMaximallyMixed) {
  std::mt19937_64 rng(1);
  const ThermoSystem sys = random_system(3, 2, rng);
  const ThermalState st = thermal_state(sys, Vector::Zero(2), 1e6);
  EXPECT_LE(max_abs(st.rho - Matrix::Identity(8, 8) / 8.0), 1e-5);
}

TEST(ThermalState, MatchesMatrixExponential) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const ThermoSystem sys = random_system(3, 2, rng);
    const Vector mu = random_mu(2, rng);
    const double t = 0.3 + 0.1 * trial;
    const Matrix a = oracle_dense(sys.hamiltonian) - mu(0) * oracle_dense(sys.charges[0]) -
                     mu(1) * oracle_dense(sys.charges[1]);
    EXPECT_LE(max_abs(thermal_state(sys, mu, t).rho - testing::oracle_gibbs(a, t)), 1e-12);
  }
}

TEST(ThermalState, RepetitionLowTemperatureNearCodespace) {
  const StabilizerCode code = builtin_code("repetition3");
  const ThermoSystem sys = build_stabilizer_system(code, {{{1}, 0.0}});
  const double t = 0.01;
  const ThermalState st = thermal_state(sys, Vector::Zero(1), t);
  const Matrix target = codespace_projector(code) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(st.rho - target, Eigen::EigenvaluesOnly);
  const double td = 0.5 * es.eigenvalues().cwiseAbs().sum();
  const double gap = 2.0;
  const double bound = 1.0 / (1.0 + std::exp(gap / t) * 2.0 / 6.0);
  EXPECT_LE(td, bound + 1e-15);
}

TEST(ThermalState, ShiftInvariant) {
  std::mt19937_64 rng(3);
  const Matrix a = random_hamiltonian(3, rng).dense();
  const ThermalState s1 = thermal_state_of(a, 0.4);
  const ThermalState s2 = thermal_state_of(a + 7.0 * Matrix::Identity(8, 8), 0.4);
  EXPECT_LE(max_abs(s1.rho - s2.rho), 1e-12);
}

TEST(ThermalState, CommutesWithEffectiveHamiltonian) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const ThermoSystem sys = random_system(3, 3, rng);
    const Vector mu = random_mu(3, rng);
    const ThermalState st = thermal_state(sys, mu, 0.2 + 0.05 * trial);
    EXPECT_LE(commutator_norm(st.rho, effective_hamiltonian(sys, mu)), 1e-9);
  }
}

TEST(ThermalState, UnderflowStaysFinite) {
  const ThermoSystem sys = build_heisenberg(HeisenbergSpec{}, {1.0, 0.0, 1.0});
  const Vector mu = Vector::Constant(3, 2.0);
  const ThermalState st = thermal_state(sys, mu, 1e-4);
  EXPECT_TRUE(st.log_probs.allFinite());
  EXPECT_NEAR(st.probs.sum(), 1.0, 1e-12);
  EXPECT_TRUE(st.probs.minCoeff() == 0.0);
  EXPECT_TRUE(hessian_exact(sys, st).allFinite());
  EXPECT_THROW(thermal_state(sys, mu, 0.0), ContractError);
}

TEST(LogPartition, EmptyHamiltonian) {
  for (int n = 1; n <= 4; ++n) {
    ThermoSystem sys;
    sys.hamiltonian = Observable(n);
    EXPECT_NEAR(log_partition(sys, Vector(0), 0.7), n * std::log(2.0), 1e-12);
  }
}

TEST(LogPartition, SingleQubitMinusZ) {
  const ThermoSystem sys = single_qubit("Z", -1.0, {});
  EXPECT_NEAR(log_partition(sys, Vector(0), 1.0), std::log(std::exp(1.0) + std::exp(-1.0)), 1e-14);
}

TEST(LogPartition, MatchesDirectExponential) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const ThermoSystem sys = random_system(3, 2, rng);
    const Vector mu = random_mu(2, rng);
    const Matrix a = oracle_dense(sys.hamiltonian) - mu(0) * oracle_dense(sys.charges[0]) -
                     mu(1) * oracle_dense(sys.charges[1]);
    const Matrix e = (-a).exp();
    EXPECT_NEAR(log_partition(sys, mu, 1.0), std::log(e.trace().real()), 1e-10);
  }
}

TEST(Objective, ZeroMuIsMinusTLogZ) {
  std::mt19937_64 rng(6);
  const ThermoSystem sys = random_system(3, 2, rng);
  const double t = 0.3;
  EXPECT_NEAR(objective_f(sys, sys.target_vector(), Vector::Zero(2), t), -t * log_partition(sys, Vector::Zero(2), t),
              1e-14);
}

TEST(Objective, DualityIdentity) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const ThermoSystem sys = random_system(3, 3, rng);
    const Vector q = sys.target_vector();
    const Vector mu = random_mu(3, rng);
    const double t = 0.1 + 0.02 * trial;
    const ThermalState st = thermal_state(sys, mu, t);
    const Matrix a = effective_hamiltonian(sys, mu);
    const double s = von_neumann_entropy(st.rho);
    const double rhs = mu.dot(q) + testing::loop_trace(a, st.rho) - t * s;
    EXPECT_NEAR(objective_f(sys, q, mu, t), rhs, 1e-10);
  }
}

TEST(Objective, ConcaveAlongSegments) {
  std::mt19937_64 rng(8);
  const ThermoSystem sys = random_system(3, 3, rng);
  const Vector q = sys.target_vector();
  for (int trial = 0; trial < 20; ++trial) {
    const Vector a = random_mu(3, rng);
    const Vector b = random_mu(3, rng);
    const double mid = objective_f(sys, q, 0.5 * (a + b), 0.5);
    EXPECT_GE(mid, 0.5 * (objective_f(sys, q, a, 0.5) + objective_f(sys, q, b, 0.5)) - 1e-12);
  }
}

TEST(Gradient, VanishesAtOwnExpectations) {
  std::mt19937_64 rng(9);
  const ThermoSystem sys = random_system(3, 3, rng);
  const Vector mu = random_mu(3, rng);
  const ThermalState st = thermal_state(sys, mu, 0.5);
  const Vector q = charge_expectations(sys, st);
  EXPECT_LE(gradient(sys, q, mu, 0.5).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Gradient, MatchesCentralDifferences) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> temp(0.1, 2.0);
  for (int trial = 0; trial < 25; ++trial) {
    const ThermoSystem sys = random_system(3, 3, rng);
    const Vector q = sys.target_vector();
    const Vector mu = random_mu(3, rng);
    const double t = temp(rng);
    const Vector g = gradient(sys, q, mu, t);
    for (int i = 0; i < 3; ++i) {
      Vector e = Vector::Zero(3);
      e(i) = 1e-5;
      const double fd = (objective_f(sys, q, mu + e, t) - objective_f(sys, q, mu - e, t)) / 2e-5;
      EXPECT_NEAR(g(i), fd, 1e-6);
    }
  }
}

TEST(Hessian, TwoLevelClosedForm) {
  const ThermoSystem sys = single_qubit("Z", 0.0, {"Z"});
  const RealMatrix h = hessian_exact(sys, Vector::Zero(1), 1.0);
  EXPECT_NEAR(h(0, 0), -1.0, 1e-14);
  // Away from zero: -(1/T)(1 - tanh^2(mu/T)).
  const RealMatrix h2 = hessian_exact(sys, Vector::Constant(1, 0.3), 0.5);
  EXPECT_NEAR(h2(0, 0), -(1.0 / 0.5) * (1.0 - std::pow(std::tanh(0.3 / 0.5), 2)), 1e-13);
}

TEST(Hessian, MatchesDifferencesOfGradient) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> temp(0.1, 2.0);
  for (int trial = 0; trial < 25; ++trial) {
    const ThermoSystem sys = random_system(3, 3, rng);
    const Vector q = sys.target_vector();
    const Vector mu = random_mu(3, rng);
    const double t = temp(rng);
    const RealMatrix h = hessian_exact(sys, mu, t);
    for (int i = 0; i < 3; ++i) {
      Vector e = Vector::Zero(3);
      e(i) = 1e-4;
      const Vector col = (gradient(sys, q, mu + e, t) - gradient(sys, q, mu - e, t)) / 2e-4;
      EXPECT_LE((col - h.col(i)).cwiseAbs().maxCoeff(), 1e-5);
    }
  }
}

TEST(Hessian, NegativeSemidefiniteAndBoundedByL) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> temp(0.1, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const ThermoSystem sys = random_system(3, 3, rng);
    const double t = temp(rng);
    const RealMatrix h = hessian_exact(sys, random_mu(3, rng), t);
    EXPECT_LE((h - h.transpose()).cwiseAbs().maxCoeff(), 1e-14);
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(h);
    EXPECT_LE(es.eigenvalues().maxCoeff(), 1e-10);
    EXPECT_LE(es.eigenvalues().cwiseAbs().maxCoeff(), smoothness_L(sys, t));
  }
}

// Kubo-Mori form -(1/T) int_0^1 Tr[dQ_i rho^s dQ_j rho^(1-s)] ds + (1/T)<Q_i><Q_j>
// rewritten with centred charges, by Gauss-Legendre quadrature.
TEST(Hessian, MatchesKuboMoriQuadrature) {
  static const double kNodes[] = {-0.9739065285171717, -0.8650633666889845, -0.6794095682990244,
                                  -0.4333953941292472, -0.1488743389816312, 0.1488743389816312,
                                  0.4333953941292472,  0.6794095682990244,  0.8650633666889845,
                                  0.9739065285171717};
  static const double kWeights[] = {0.0666713443086881, 0.1494513491505806, 0.2190863625159820,
                                    0.2692667193099963, 0.2955242247147529, 0.2955242247147529,
                                    0.2692667193099963, 0.2190863625159820, 0.1494513491505806,
                                    0.0666713443086881};
  std::mt19937_64 rng(13);
  const ThermoSystem sys = random_system(2, 2, rng);
  const Vector mu = random_mu(2, rng);
  const double t = 1.5;
  const Matrix rho = testing::oracle_gibbs(oracle_dense(sys.hamiltonian) - mu(0) * oracle_dense(sys.charges[0]) -
                                               mu(1) * oracle_dense(sys.charges[1]),
                                           t);
  const Matrix log_rho = rho.log();
  RealMatrix expected(2, 2);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const Matrix qi = oracle_dense(sys.charges[i]);
      const Matrix qj = oracle_dense(sys.charges[j]);
      const double ei = testing::loop_trace(qi, rho);
      const double ej = testing::loop_trace(qj, rho);
      const Matrix di = qi - ei * Matrix::Identity(4, 4);
      const Matrix dj = qj - ej * Matrix::Identity(4, 4);
      double integral = 0.0;
      for (int k = 0; k < 10; ++k) {
        const double s = 0.5 * (kNodes[k] + 1.0);
        const Matrix rs = (s * log_rho).exp();
        const Matrix rt = ((1.0 - s) * log_rho).exp();
        integral += 0.5 * kWeights[k] * (di * rs * dj * rt).trace().real();
      }
      expected(i, j) = -integral / t;
    }
  }
  EXPECT_LE((hessian_exact(sys, mu, t) - expected).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(LogMean, Values) {
  EXPECT_DOUBLE_EQ(log_mean(std::log(0.3), std::log(0.3)), 0.3);
  EXPECT_NEAR(log_mean(std::log(0.5), std::log(0.2)), 0.3 / std::log(2.5), 1e-15);
  EXPECT_NEAR(log_mean(std::log(0.2), std::log(0.5)), 0.3 / std::log(2.5), 1e-15);
  const double ninf = -std::numeric_limits<double>::infinity();
  EXPECT_EQ(log_mean(ninf, ninf), 0.0);
  EXPECT_EQ(log_mean(0.0, ninf), 0.0);
  // Both weights below the flush floor still give a positive mean.
  EXPECT_GT(log_mean(-700.0, -700.5), 0.0);
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double a = u(rng);
    const double b = a * (1.0 + 1e-3 * u(rng));
    EXPECT_NEAR(log_mean(std::log(a), std::log(b)), (a - b) / (std::log(a) - std::log(b)), 1e-12);
    EXPECT_GE(log_mean(std::log(a), std::log(b)), std::sqrt(a * b) * (1 - 1e-14));
    EXPECT_LE(log_mean(std::log(a), std::log(b)), 0.5 * (a + b) * (1 + 1e-14));
  }
}

TEST(FreeEnergy, PureGroundState) {
  std::mt19937_64 rng(15);
  const ThermoSystem sys = random_system(3, 1, rng);
  Eigen::SelfAdjointEigenSolver<Matrix> es(oracle_dense(sys.hamiltonian));
  const Matrix psi = es.eigenvectors().col(0) * es.eigenvectors().col(0).adjoint();
  EXPECT_NEAR(primal_free_energy(sys, psi, 0.7), es.eigenvalues()(0), 1e-12);
}

TEST(FreeEnergy, MaximallyMixedWithoutHamiltonian) {
  ThermoSystem sys;
  sys.hamiltonian = Observable(3);
  EXPECT_NEAR(primal_free_energy(sys, Matrix::Identity(8, 8) / 8.0, 0.4), -0.4 * 3 * std::log(2.0), 1e-14);
}

TEST(FreeEnergy, OptimalValueMatchesDual) {
  std::mt19937_64 rng(16);
  ThermoSystem sys = random_system(3, 3, rng);
  const Vector mu_star = random_mu(3, rng);
  const double t = 0.5;
  const ThermalState st = thermal_state(sys, mu_star, t);
  const Vector q = charge_expectations(sys, st);
  EXPECT_NEAR(primal_free_energy(sys, st.rho, t), mu_star.dot(q) - t * log_partition(sys, mu_star, t), 1e-9);
}

TEST(Smoothness, Values) {
  EXPECT_DOUBLE_EQ(smoothness_L(single_qubit("Z", 0.0, {"Z"}), 1.0), 2.0);
  const ThermoSystem heis = build_heisenberg(HeisenbergSpec{}, {0, 0, 0});
  EXPECT_NEAR(smoothness_L(heis, 0.5), 54.0 / 0.5, 1e-10);
  EXPECT_NEAR(temperature_for_epsilon(0.1, 5), 0.1 / (5 * std::log(2.0)), 1e-16);
}

}  // namespace
}  // namespace qthermo
