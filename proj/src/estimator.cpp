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

#include "qthermo/estimator.hpp"

#include <fmt/format.h>

#include "qthermo/error.hpp"

namespace qthermo {

const Observable& observable_by_id(const ThermoSystem& system, int observable_id) {
  if (observable_id == 0) return system.hamiltonian;
  if (observable_id < 0 || observable_id > system.num_charges()) {
    throw ContractError(fmt::format("observable id {} out of range", observable_id));
  }
  return system.charges[observable_id - 1];
}

Estimate ExactEstimator::expectation(const ThermoSystem& system, const ThermalState& state,
                                     int observable_id, std::uint64_t, std::uint64_t) const {
  return {qthermo::expectation(observable_by_id(system, observable_id), state.rho), 0};
}

HessianEstimate ExactEstimator::hessian(const ThermoSystem& system, const ThermalState& state,
                                        std::uint64_t, std::uint64_t) const {
  return {hessian_exact(system, state), 0};
}

}  // namespace qthermo
