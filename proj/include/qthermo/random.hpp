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

#ifndef QTHERMO_RANDOM_HPP_
#define QTHERMO_RANDOM_HPP_

#include <random>

#include "qthermo/models.hpp"
#include "qthermo/operators.hpp"

namespace qthermo {

// Uniformly random Pauli word on n sites (identity allowed).
PauliString random_pauli(int n, std::mt19937_64& rng);

// Gaussian combination of all 4^n Pauli words, scaled to unit spectral norm.
Observable random_hamiltonian(int n, std::mt19937_64& rng);

// Gaussian combination of `terms` random non-identity words, scaled to unit
// spectral norm.
Observable random_charge(int n, int terms, std::mt19937_64& rng);

// Random H and c random charges; targets are the expectations in a random
// full-rank state, so they are strictly feasible.
ThermoSystem random_system(int n, int c, std::mt19937_64& rng);

// Random full-rank density matrix from a Ginibre draw.
Matrix random_density(int dim, std::mt19937_64& rng);

}  // namespace qthermo

#endif  // QTHERMO_RANDOM_HPP_
