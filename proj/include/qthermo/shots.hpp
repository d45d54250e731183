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

#ifndef QTHERMO_SHOTS_HPP_
#define QTHERMO_SHOTS_HPP_

#include <cstdint>
#include <random>
#include <vector>

#include "qthermo/estimator.hpp"
#include "qthermo/gibbs.hpp"
#include "qthermo/models.hpp"

namespace qthermo {

// SplitMix64 finalizer; a bijection on 64-bit words.
std::uint64_t splitmix64(std::uint64_t x);

/**
 * @brief Seed derivation for one random stream.
 *
 * seed = f(f(f(f(master) + iteration) + id) + block) with f = splitmix64.
 */
struct RngStreamSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t iteration = 0;
  std::uint64_t id = 0;
  std::uint64_t block = 0;

  std::uint64_t seed() const;
};

class RngStream {
 public:
  explicit RngStream(const RngStreamSpec& spec) : engine_(spec.seed()) {}
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  std::int64_t binomial(std::int64_t trials, double p);
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// p(t) = (2/pi) ln coth(pi |t| / 2)
double tent_density(double t);

/**
 * @brief Inverse-CDF sampler for the tent density on [-t_cut, t_cut].
 *
 * Interval masses come from adaptive quadrature; a refined sub-grid near
 * t = 0 resolves the logarithmic singularity.
 */
class TentSampler {
 public:
  static constexpr double kCutoff = 12.0;
  static constexpr int kKnots = 1 << 16;
  static constexpr int kExtraKnots = 1 << 12;
  static constexpr double kRefineWidth = 1e-2;

  TentSampler();
  static const TentSampler& instance();

  double sample(RngStream& stream) const;
  // Inverse CDF by binary search and linear interpolation.
  double quantile(double u) const;
  double cdf(double t) const;
  // Integral of p over [-t_cut, t_cut] before normalization.
  double table_mass() const { return mass_; }
  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& cdf_values() const { return cdf_; }

 private:
  std::vector<double> knots_;
  std::vector<double> cdf_;
  double mass_ = 0.0;
};

// Tr[P rho] outcome statistics: returns the mean of `shots` +-1 draws scaled
// by the term coefficients, summed over the non-identity terms of obs.
double estimate_observable(const Matrix& rho, const Observable& obs, std::int64_t shots_per_term,
                           RngStream& stream);
// Number of non-identity Pauli terms, i.e. terms that consume shots.
int measured_terms(const Observable& obs);

enum class PhiMode { kGeneric, kExtensive };

// w(omega) = int_{-t_cut}^{t_cut} p(t) cos(omega t) dt by adaptive quadrature.
double tent_fourier_weight(double omega);

// Phi_mu(Q_i) evaluated with quadrature in time.
Matrix phi_channel(const ThermoSystem& system, const ThermalState& state, int charge, PhiMode mode);

// -(1/2T) Tr[{Phi(Q_i), Q_j} rho] + (1/T) <Q_i><Q_j> with quadrature for Phi.
RealMatrix hessian_fourier_quadrature(const ThermoSystem& system, const ThermalState& state, PhiMode mode);

struct HessianSampling {
  int time_samples = 1000;
  std::int64_t shots = 10;  // Hadamard-test outcomes per (time sample, Pauli pair)
  PhiMode mode = PhiMode::kGeneric;
};

// Monte Carlo estimate of the Fourier-form Hessian. Each entry (i, j) uses
// streams derived from (master_seed, iteration, entry id, block).
HessianEstimate estimate_hessian(const ThermoSystem& system, const ThermalState& state,
                                 const HessianSampling& sampling, const RngStreamSpec& base);

class ShotEstimator final : public Estimator {
 public:
  ShotEstimator(std::uint64_t master_seed, std::int64_t shots_per_iteration, HessianSampling hessian = {});

  bool exact() const override { return false; }
  Estimate expectation(const ThermoSystem& system, const ThermalState& state, int observable_id,
                       std::uint64_t iteration, std::uint64_t block) const override;
  HessianEstimate hessian(const ThermoSystem& system, const ThermalState& state, std::uint64_t iteration,
                          std::uint64_t block) const override;

  // Shots per Pauli term: the per-iteration budget split evenly over the
  // measured terms of H and all charges.
  std::int64_t shots_per_term(const ThermoSystem& system) const;

 private:
  std::uint64_t master_seed_;
  std::int64_t shots_per_iteration_;
  HessianSampling hessian_;
};

}  // namespace qthermo

#endif  // QTHERMO_SHOTS_HPP_
