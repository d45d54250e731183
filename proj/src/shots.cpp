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

#include "qthermo/shots.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <fmt/format.h>

#include "qthermo/error.hpp"

namespace qthermo {
namespace {

using boost::math::quadrature::gauss_kronrod;
using boost::math::quadrature::tanh_sinh;

constexpr double kQuadTolerance = 1e-14;
// Stream ids below this are reserved for observables.
constexpr std::uint64_t kHessianIdBase = 1000;

double integrate_tent(double a, double b) {
  auto f = [](double t) { return tent_density(t); };
  if (a == 0.0) {
    thread_local tanh_sinh<double> ts;
    return ts.integrate(f, a, b, kQuadTolerance);
  }
  return gauss_kronrod<double, 15>::integrate(f, a, b, 8, kQuadTolerance);
}

// Embeds a 2x2 operator on `site` of an n-qubit register (site 0 leftmost).
Matrix embed_site(const Eigen::Matrix2cd& m, int site, int n) {
  const std::int64_t dim = std::int64_t{1} << n;
  const int shift = n - 1 - site;
  Matrix out = Matrix::Zero(dim, dim);
  for (std::int64_t b = 0; b < dim; ++b) {
    const int bit = static_cast<int>((b >> shift) & 1);
    const std::int64_t base = b & ~(std::int64_t{1} << shift);
    for (int r = 0; r < 2; ++r) out(base | (std::int64_t{r} << shift), b) = m(r, bit);
  }
  return out;
}

const Eigen::Matrix2cd& site_pauli(int i) {
  static const Eigen::Matrix2cd kPaulis[3] = {
      (Eigen::Matrix2cd() << 0, 1, 1, 0).finished(),
      (Eigen::Matrix2cd() << 0, cplx(0, -1), cplx(0, 1), 0).finished(),
      (Eigen::Matrix2cd() << 1, 0, 0, -1).finished(),
  };
  return kPaulis[i];
}

void require_extensive(const ThermoSystem& system) {
  if (!system.extensive || !system.conserved || system.num_charges() != 3) {
    throw ContractError("extensive mode needs conserved charges X_tot, Y_tot, Z_tot");
  }
  const auto expected = total_magnetizations(system.num_qubits());
  for (int i = 0; i < 3; ++i) {
    if (!(system.charges[i] == expected[i])) {
      throw ContractError("extensive mode needs conserved charges X_tot, Y_tot, Z_tot");
    }
  }
  for (const Observable& q : system.charges) {
    if (commutator_norm(system.hamiltonian.dense(), q.dense()) > 1e-12) {
      throw ContractError("extensive mode needs charges that commute with H");
    }
  }
}

Eigen::Matrix2cd site_field(const Vector& mu) {
  Eigen::Matrix2cd b = Eigen::Matrix2cd::Zero();
  for (int i = 0; i < 3; ++i) b += mu(i) * site_pauli(i);
  return b;
}

// Evaluates w on |omega| values with memoization; identical gaps share a value.
class WeightTable {
 public:
  double operator()(double omega) {
    const double key = std::abs(omega);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    double w = tent_fourier_weight(key);
    cache_.emplace(key, w);
    return w;
  }

 private:
  std::map<double, double> cache_;
};

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t RngStreamSpec::seed() const {
  std::uint64_t h = splitmix64(master_seed);
  h = splitmix64(h + iteration);
  h = splitmix64(h + id);
  return splitmix64(h + block);
}

double RngStream::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::int64_t RngStream::binomial(std::int64_t trials, double p) {
  if (p <= 0.0) return 0;
  if (p >= 1.0) return trials;
  std::binomial_distribution<std::int64_t> dist(trials, p);
  return dist(engine_);
}

double tent_density(double t) {
  const double a = std::abs(t);
  if (a == 0.0) return std::numeric_limits<double>::infinity();
  // ln coth(x) = 2 atanh(e^{-2x}) with x = pi |t| / 2
  const double x = std::numbers::pi * a;
  if (x > 1.0) return 4.0 / std::numbers::pi * std::atanh(std::exp(-x));
  // atanh(e^{-x}) loses everything once e^{-x} rounds to 1.
  return 2.0 / std::numbers::pi * (std::log1p(std::exp(-x)) - std::log(-std::expm1(-x)));
}

TentSampler::TentSampler() {
  const int half = kKnots / 2;
  std::vector<double> pos;
  pos.reserve(half + kExtraKnots / 2 + 1);
  for (int k = 0; k <= half; ++k) pos.push_back(kCutoff * k / half);
  for (int k = 1; k <= kExtraKnots / 2; ++k) pos.push_back(kRefineWidth * k / (kExtraKnots / 2));
  std::sort(pos.begin(), pos.end());
  pos.erase(std::unique(pos.begin(), pos.end()), pos.end());

  std::vector<double> cum(pos.size(), 0.0);
  for (std::size_t k = 1; k < pos.size(); ++k) cum[k] = cum[k - 1] + integrate_tent(pos[k - 1], pos[k]);
  const double half_mass = cum.back();
  mass_ = 2.0 * half_mass;

  const std::size_t m = pos.size();
  knots_.resize(2 * m - 1);
  cdf_.resize(2 * m - 1);
  for (std::size_t k = 0; k < m; ++k) {
    // Mirror image so the table is exactly symmetric about 0.
    knots_[m - 1 + k] = pos[k];
    knots_[m - 1 - k] = -pos[k];
    const double tail = cum[k] / mass_;
    cdf_[m - 1 + k] = 0.5 + tail;
    cdf_[m - 1 - k] = 0.5 - tail;
  }
  cdf_.front() = 0.0;
  cdf_.back() = 1.0;
}

const TentSampler& TentSampler::instance() {
  static const TentSampler sampler;
  return sampler;
}

double TentSampler::quantile(double u) const {
  u = std::clamp(u, 0.0, 1.0);
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) return knots_.back();
  std::size_t hi = static_cast<std::size_t>(it - cdf_.begin());
  if (hi == 0) return knots_.front();
  std::size_t lo = hi - 1;
  const double span = cdf_[hi] - cdf_[lo];
  const double frac = span > 0.0 ? (u - cdf_[lo]) / span : 0.0;
  return knots_[lo] + frac * (knots_[hi] - knots_[lo]);
}

double TentSampler::sample(RngStream& stream) const { return quantile(stream.uniform()); }

double TentSampler::cdf(double t) const {
  if (t <= knots_.front()) return 0.0;
  if (t >= knots_.back()) return 1.0;
  auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  std::size_t hi = static_cast<std::size_t>(it - knots_.begin());
  std::size_t lo = hi - 1;
  const double frac = (t - knots_[lo]) / (knots_[hi] - knots_[lo]);
  return cdf_[lo] + frac * (cdf_[hi] - cdf_[lo]);
}

int measured_terms(const Observable& obs) {
  return static_cast<int>(std::count_if(obs.terms().begin(), obs.terms().end(),
                                        [](const Observable::Term& t) { return !t.word.is_identity(); }));
}

double estimate_observable(const Matrix& rho, const Observable& obs, std::int64_t shots_per_term,
                           RngStream& stream) {
  if (shots_per_term < 1) throw ContractError("shots_per_term must be at least 1");
  double total = 0.0;
  for (const Observable::Term& term : obs.terms()) {
    if (term.word.is_identity()) {
      total += term.coefficient;
      continue;
    }
    const double v = pauli_expectation(term.word, rho).real();
    if (std::abs(v) > 1.0 + 1e-9) {
      throw NumericalError(fmt::format("Pauli expectation {} outside [-1, 1]", v));
    }
    const double p = std::clamp(0.5 * (1.0 + v), 0.0, 1.0);
    const std::int64_t k = stream.binomial(shots_per_term, p);
    total += term.coefficient * (2.0 * static_cast<double>(k) / static_cast<double>(shots_per_term) - 1.0);
  }
  return total;
}

double tent_fourier_weight(double omega) {
  const double w = std::abs(omega);
  auto f = [w](double t) { return tent_density(t) * std::cos(w * t); };
  const double panel = w > 0.0 ? std::min(0.5, std::numbers::pi / (2.0 * w)) : 0.5;
  thread_local tanh_sinh<double> ts;
  double sum = ts.integrate(f, 0.0, panel, kQuadTolerance);
  const double cut = TentSampler::kCutoff;
  for (double a = panel; a < cut; a += panel) {
    const double b = std::min(cut, a + panel);
    sum += gauss_kronrod<double, 31>::integrate(f, a, b, 6, kQuadTolerance);
  }
  return 2.0 * sum;
}

Matrix phi_channel(const ThermoSystem& system, const ThermalState& state, int charge, PhiMode mode) {
  if (charge < 0 || charge >= system.num_charges()) throw ContractError("charge index out of range");
  const double t = state.temperature;
  WeightTable weight;
  if (mode == PhiMode::kGeneric) {
    const Matrix& v = state.spectrum.vectors;
    const Vector& a = state.spectrum.values;
    Matrix qt = v.adjoint() * system.charges[charge].dense() * v;
    for (Eigen::Index r = 0; r < qt.rows(); ++r) {
      for (Eigen::Index c = 0; c < qt.cols(); ++c) qt(r, c) *= weight((a(r) - a(c)) / t);
    }
    return v * qt * v.adjoint();
  }
  require_extensive(system);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(site_field(state.mu));
  const Eigen::Matrix2cd& w = es.eigenvectors();
  const Eigen::Vector2d& b = es.eigenvalues();
  Eigen::Matrix2cd st = w.adjoint() * site_pauli(charge) * w;
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) st(r, c) *= weight((b(r) - b(c)) / t);
  }
  const Eigen::Matrix2cd local = w * st * w.adjoint();
  const int n = system.num_qubits();
  const std::int64_t dim = std::int64_t{1} << n;
  Matrix out = Matrix::Zero(dim, dim);
  for (int j = 0; j < n; ++j) out += embed_site(local, j, n);
  return out;
}

RealMatrix hessian_fourier_quadrature(const ThermoSystem& system, const ThermalState& state, PhiMode mode) {
  const int c = system.num_charges();
  const double t = state.temperature;
  Vector mean = charge_expectations(system, state);
  RealMatrix h(c, c);
  for (int i = 0; i < c; ++i) {
    const Matrix phi = phi_channel(system, state, i, mode);
    for (int j = 0; j < c; ++j) {
      const Matrix& qj = system.charges[j].dense();
      const Matrix anti = phi * qj + qj * phi;
      const double tr = (anti.transpose().cwiseProduct(state.rho)).sum().real();
      h(i, j) = -tr / (2.0 * t) + mean(i) * mean(j) / t;
    }
  }
  return h;
}

HessianEstimate estimate_hessian(const ThermoSystem& system, const ThermalState& state,
                                 const HessianSampling& sampling, const RngStreamSpec& base) {
  if (sampling.time_samples < 1 || sampling.shots < 1) {
    throw ContractError("Hessian sampling needs at least one time sample and one shot");
  }
  const int c = system.num_charges();
  const int n = system.num_qubits();
  const double temp = state.temperature;
  const TentSampler& sampler = TentSampler::instance();
  HessianEstimate out{RealMatrix::Zero(c, c), 0};

  // Generic mode works in the eigenbasis of A = H - mu.Q.
  struct TermData {
    double coefficient;
    Matrix rotated;  // V^dag P V
  };
  std::vector<std::vector<TermData>> terms(c);
  Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic> site_moments;
  Eigen::Matrix2cd field_vectors;
  Eigen::Vector2d field_values;
  if (sampling.mode == PhiMode::kGeneric) {
    const Matrix& v = state.spectrum.vectors;
    for (int i = 0; i < c; ++i) {
      for (const auto& term : system.charges[i].terms()) {
        terms[i].push_back({term.coefficient, v.adjoint() * term.word.dense() * v});
      }
    }
  } else {
    require_extensive(system);
    // G[(j,l),(j2,k)] = Tr[sigma_l^(j) sigma_k^(j2) rho]
    site_moments.resize(3 * n, 3 * n);
    for (int j = 0; j < n; ++j) {
      for (int l = 0; l < 3; ++l) {
        for (int j2 = 0; j2 < n; ++j2) {
          for (int k = 0; k < 3; ++k) {
            PauliString a = PauliString::single(n, j, static_cast<Pauli>(l + 1));
            PauliString b = PauliString::single(n, j2, static_cast<Pauli>(k + 1));
            site_moments(3 * j + l, 3 * j2 + k) = pauli_expectation(pauli_product(a, b), state.rho);
          }
        }
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(site_field(state.mu));
    field_vectors = es.eigenvectors();
    field_values = es.eigenvalues();
  }
  const Vector& a = state.spectrum.values;
  const Vector& p = state.probs;
  const Eigen::Index d = a.size();

  auto hadamard = [&](double v, RngStream& outcomes) {
    if (std::abs(v) > 1.0 + 1e-9) throw NumericalError(fmt::format("Hadamard-test mean {} outside [-1, 1]", v));
    const double prob = std::clamp(0.5 * (1.0 + v), 0.0, 1.0);
    const std::int64_t k = outcomes.binomial(sampling.shots, prob);
    return 2.0 * static_cast<double>(k) / static_cast<double>(sampling.shots) - 1.0;
  };

  for (int i = 0; i < c; ++i) {
    for (int j = i; j < c; ++j) {
      const std::uint64_t entry = static_cast<std::uint64_t>(i * c + j);
      RngStreamSpec spec = base;
      spec.id = kHessianIdBase + 3 * entry;
      RngStream times(spec);
      spec.id += 1;
      RngStream outcomes(spec);
      spec.id += 1;
      RngStream products(spec);

      double acc = 0.0;
      std::int64_t shots = 0;
      for (int s = 0; s < sampling.time_samples; ++s) {
        const double t = sampler.sample(times);
        double sample = 0.0;
        if (sampling.mode == PhiMode::kGeneric) {
          // phase(a, b) = exp(-i (a_a - a_b) t / T)
          Eigen::VectorXcd ph(d);
          for (Eigen::Index r = 0; r < d; ++r) ph(r) = std::polar(1.0, -a(r) * t / temp);
          const Matrix phase = ph * ph.adjoint();
          for (const TermData& tp : terms[i]) {
            const Matrix evolved = tp.rotated.cwiseProduct(phase);
            for (const TermData& tr : terms[j]) {
              // Re sum_ab P(t)_ab R_ba p_a
              double v = 0.0;
              for (Eigen::Index x = 0; x < d; ++x) {
                if (p(x) == 0.0) continue;
                v += p(x) * (evolved.row(x).transpose().cwiseProduct(tr.rotated.col(x))).sum().real();
              }
              sample += tp.coefficient * tr.coefficient * hadamard(v, outcomes);
              shots += sampling.shots;
            }
          }
        } else {
          // e^{i B t/T} sigma_i e^{-i B t/T} = sum_l R_il sigma_l on each site.
          Eigen::Vector2cd ph;
          for (int r = 0; r < 2; ++r) ph(r) = std::polar(1.0, field_values(r) * t / temp);
          const Eigen::Matrix2cd u = field_vectors * ph.asDiagonal() * field_vectors.adjoint();
          const Eigen::Matrix2cd rotated = u * site_pauli(i) * u.adjoint();
          double rcoef[3];
          for (int l = 0; l < 3; ++l) rcoef[l] = 0.5 * (rotated * site_pauli(l)).trace().real();
          for (int s1 = 0; s1 < n; ++s1) {
            for (int s2 = 0; s2 < n; ++s2) {
              cplx v(0, 0);
              for (int l = 0; l < 3; ++l) v += rcoef[l] * site_moments(3 * s1 + l, 3 * s2 + j);
              sample += hadamard(v.real(), outcomes);
              shots += sampling.shots;
            }
          }
        }
        acc += sample;
      }
      const double first = acc / sampling.time_samples;
      const std::int64_t product_shots = sampling.shots * sampling.time_samples;
      const double qi = estimate_observable(state.rho, system.charges[i], product_shots, products);
      const double qj = estimate_observable(state.rho, system.charges[j], product_shots, products);
      shots += product_shots * (measured_terms(system.charges[i]) + measured_terms(system.charges[j]));
      out.value(i, j) = -first / temp + qi * qj / temp;
      out.value(j, i) = out.value(i, j);
      out.shots += shots;
    }
  }
  return out;
}

ShotEstimator::ShotEstimator(std::uint64_t master_seed, std::int64_t shots_per_iteration,
                             HessianSampling hessian)
    : master_seed_(master_seed), shots_per_iteration_(shots_per_iteration), hessian_(hessian) {
  if (shots_per_iteration < 1) throw ConfigError("shots per iteration must be positive");
}

std::int64_t ShotEstimator::shots_per_term(const ThermoSystem& system) const {
  std::int64_t terms = measured_terms(system.hamiltonian);
  for (const Observable& q : system.charges) terms += measured_terms(q);
  return std::max<std::int64_t>(1, shots_per_iteration_ / std::max<std::int64_t>(1, terms));
}

Estimate ShotEstimator::expectation(const ThermoSystem& system, const ThermalState& state, int observable_id,
                                    std::uint64_t iteration, std::uint64_t block) const {
  const Observable& obs = observable_by_id(system, observable_id);
  const std::int64_t n = shots_per_term(system);
  RngStream stream(RngStreamSpec{master_seed_, iteration, static_cast<std::uint64_t>(observable_id), block});
  return {estimate_observable(state.rho, obs, n, stream), n * measured_terms(obs)};
}

HessianEstimate ShotEstimator::hessian(const ThermoSystem& system, const ThermalState& state,
                                       std::uint64_t iteration, std::uint64_t block) const {
  return estimate_hessian(system, state, hessian_, RngStreamSpec{master_seed_, iteration, 0, block});
}

}  // namespace qthermo
