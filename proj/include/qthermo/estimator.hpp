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

#ifndef QTHERMO_ESTIMATOR_HPP_
#define QTHERMO_ESTIMATOR_HPP_

#include <cstdint>

#include "qthermo/gibbs.hpp"
#include "qthermo/models.hpp"

namespace qthermo {

struct Estimate {
  double value = 0.0;
  std::int64_t shots = 0;
};

struct HessianEstimate {
  RealMatrix value;
  std::int64_t shots = 0;
};

/**
 * @brief Source of expectation values and Hessians at a thermal state.
 *
 * Observable id 0 is the Hamiltonian and id i >= 1 is charge i-1.
 * `iteration` and `block` identify the call so that shot-based estimators
 * can derive independent, reproducible random streams.
 */
class Estimator {
 public:
  virtual ~Estimator() = default;
  virtual bool exact() const = 0;
  virtual Estimate expectation(const ThermoSystem& system, const ThermalState& state, int observable_id,
                               std::uint64_t iteration, std::uint64_t block) const = 0;
  virtual HessianEstimate hessian(const ThermoSystem& system, const ThermalState& state,
                                  std::uint64_t iteration, std::uint64_t block) const = 0;
};

class ExactEstimator final : public Estimator {
 public:
  bool exact() const override { return true; }
  Estimate expectation(const ThermoSystem& system, const ThermalState& state, int observable_id,
                       std::uint64_t iteration, std::uint64_t block) const override;
  HessianEstimate hessian(const ThermoSystem& system, const ThermalState& state, std::uint64_t iteration,
                          std::uint64_t block) const override;
};

const Observable& observable_by_id(const ThermoSystem& system, int observable_id);

}  // namespace qthermo

#endif  // QTHERMO_ESTIMATOR_HPP_
