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

#include "qthermo/encoding.hpp"

#include <cmath>

#include <fmt/format.h>

#include "qthermo/error.hpp"
#include "qthermo/gibbs.hpp"

namespace qthermo {
namespace {

constexpr double kStateTolerance = 1e-9;

int word_index(const std::vector<int>& word) {
  int idx = 0;
  for (int d : word) idx = 4 * idx + d;
  return idx;
}

// k-qubit Pauli word with letters given by the digits.
PauliString plain_word(const std::vector<int>& word) {
  std::vector<Pauli> letters;
  for (int d : word) letters.push_back(static_cast<Pauli>(d));
  return PauliString(std::move(letters));
}

void require_single_logical(const StabilizerCode& code) {
  if (code.k != 1) throw ContractError(fmt::format("code {} has k = {}, expected 1", code.name, code.k));
}

}  // namespace

LogicalTarget LogicalTarget::from_bloch(const BlochVector& r) {
  LogicalTarget t = maximally_mixed(1);
  for (int i = 0; i < 3; ++i) t.coefficients[i + 1] = r(i);
  return t;
}

LogicalTarget LogicalTarget::maximally_mixed(int k) {
  LogicalTarget t;
  t.k = k;
  t.coefficients.assign(std::size_t{1} << (2 * k), 0.0);
  t.coefficients[0] = 1.0;
  return t;
}

LogicalTarget LogicalTarget::bell(double strength) {
  LogicalTarget t = maximally_mixed(2);
  t.set({1, 1}, strength);
  t.set({2, 2}, -strength);
  t.set({3, 3}, strength);
  return t;
}

double LogicalTarget::coefficient(const std::vector<int>& word) const {
  return coefficients.at(word_index(word));
}

void LogicalTarget::set(const std::vector<int>& word, double value) {
  if (static_cast<int>(word.size()) != k) throw ConfigError("logical word length differs from k");
  if (word_index(word) == 0 && value != 1.0) throw ConfigError("identity coefficient is fixed to 1");
  coefficients.at(word_index(word)) = value;
}

Matrix LogicalTarget::matrix() const {
  if (coefficients.size() != (std::size_t{1} << (2 * k)) || coefficients[0] != 1.0) {
    throw ConfigError("logical target needs 4^k coefficients with identity coefficient 1");
  }
  const std::int64_t dim = std::int64_t{1} << k;
  Matrix m = Matrix::Zero(dim, dim);
  const auto words = all_logical_words(k);
  for (std::size_t w = 0; w < words.size(); ++w) {
    if (coefficients[w] != 0.0) m += coefficients[w] * plain_word(words[w]).dense();
  }
  m /= static_cast<double>(dim);
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  if (es.eigenvalues()(0) < -kStateTolerance) {
    throw DomainError(fmt::format("logical target is not positive semidefinite (min eigenvalue {})",
                                  es.eigenvalues()(0)));
  }
  return m;
}

ExponentialCoords mixture_to_exponential(const BlochVector& r) {
  const double norm = r.norm();
  if (!(norm < 1.0)) throw DomainError("pure or unphysical Bloch vector has no exponential coordinates");
  if (norm == 0.0) return {Eigen::Vector3d::Zero(), -1.0};
  return {r, std::atanh(-norm) / norm};
}

ExponentialCoords mixture_to_exponential_normalized(const BlochVector& r) {
  const double norm = r.norm();
  if (!(norm < 1.0)) throw DomainError("pure or unphysical Bloch vector has no exponential coordinates");
  if (norm == 0.0) return {Eigen::Vector3d::Zero(), 0.0};
  return {-r / norm, std::atanh(norm)};
}

BlochVector exponential_to_mixture(const Eigen::Vector3d& mu, double beta) {
  const double norm = mu.norm();
  if (norm == 0.0) return BlochVector::Zero();
  return std::tanh(-beta * norm) * mu / norm;
}

ThermoSystem logical_bloch_system(const StabilizerCode& code, const BlochVector& r) {
  require_single_logical(code);
  return build_stabilizer_system(code, {{{1}, r(0)}, {{2}, r(1)}, {{3}, r(2)}});
}

WarmStartResult warm_start_state(const StabilizerCode& code, const BlochVector& r, double temperature,
                                 WarmStartVariant variant) {
  require_single_logical(code);
  WarmStartResult out;
  out.warm.coords = variant == WarmStartVariant::kSigned ? mixture_to_exponential(r)
                                                           : mixture_to_exponential_normalized(r);
  const ThermoSystem sys = logical_bloch_system(code, r);
  out.warm.chemical_potential = -out.warm.coords.beta * temperature * out.warm.coords.mu;
  // H + beta T mu.L = H - chem.L
  out.rho = thermal_state(sys, out.warm.chemical_potential, temperature).rho;
  return out;
}

ExponentialLogicalState exponential_logical_state(const StabilizerCode& code, const LogicalTarget& target, double temperature) {
  if (target.k != code.k) throw ContractError("target and code have different k");
  const Matrix rho_l = target.matrix();
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho_l);
  if (es.eigenvalues()(0) <= kStateTolerance) {
    throw DomainError(
        "logical target must be strictly mixed (full rank) to have an exponential form; "
        "shrink pure targets radially first");
  }
  const Matrix& v = es.eigenvectors();
  const Matrix log_rho = v * es.eigenvalues().array().log().matrix().cast<cplx>().asDiagonal() * v.adjoint();
  const auto words = all_logical_words(code.k);
  const double dim = std::ldexp(1.0, code.k);
  ExponentialLogicalState out;
  Matrix check = Matrix::Zero(rho_l.rows(), rho_l.cols());
  for (const auto& w : words) {
    const Matrix p = plain_word(w).dense();
    const double c = (p * log_rho).trace().real() / dim;
    out.log_coefficients.push_back(c);
    check += c * p;
  }
  if ((check - log_rho).cwiseAbs().maxCoeff() > 1e-10) {
    throw NumericalError("Pauli expansion of the logical matrix logarithm is inaccurate");
  }
  // -(H - T sum_w mu_w sigma_w)/T: identity term drops out in normalization.
  Matrix a = build_stabilizer_system(code, {}).hamiltonian.dense();
  for (std::size_t w = 1; w < words.size(); ++w) {
    a -= temperature * out.log_coefficients[w] * logical_pauli_product(code, words[w]).dense();
  }
  out.rho = thermal_state_of(a, temperature).rho;
  return out;
}

ThermoSystem logical_target_system(const StabilizerCode& code, const LogicalTarget& target) {
  if (target.k != code.k) throw ContractError("target and code have different k");
  std::vector<ChargeSpec> charges;
  const auto words = all_logical_words(code.k);
  for (std::size_t w = 1; w < words.size(); ++w) charges.push_back({words[w], target.coefficients[w]});
  return build_stabilizer_system(code, charges);
}

Matrix encoded_state(const StabilizerCode& code, const LogicalTarget& target) {
  if (target.k != code.k) throw ContractError("target and code have different k");
  target.matrix();  // validates the target
  const auto words = all_logical_words(code.k);
  const std::int64_t dim = std::int64_t{1} << code.n;
  Matrix m = Matrix::Zero(dim, dim);
  for (std::size_t w = 0; w < words.size(); ++w) {
    if (target.coefficients[w] != 0.0) {
      m += target.coefficients[w] * logical_pauli_product(code, words[w]).dense();
    }
  }
  const Matrix proj = codespace_projector(code);
  Matrix out = proj * m * proj;
  const double tr = out.trace().real();
  if (!(tr > 0.0)) throw NumericalError("encoded state has zero trace");
  out /= tr;
  // Remove rounding asymmetry.
  return 0.5 * (out + out.adjoint());
}

std::vector<double> logical_expectations(const StabilizerCode& code, const Matrix& rho) {
  std::vector<double> out;
  for (const auto& w : all_logical_words(code.k)) {
    out.push_back(pauli_expectation(logical_pauli_product(code, w), rho).real());
  }
  return out;
}

}  // namespace qthermo
