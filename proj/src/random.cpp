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

#include "qthermo/random.hpp"

#include <utility>

#include "qthermo/encoding.hpp"

namespace qthermo {

PauliString random_pauli(int n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> letter(0, 3);
  std::vector<Pauli> letters(n);
  for (auto& l : letters) l = static_cast<Pauli>(letter(rng));
  return PauliString(std::move(letters));
}

Observable random_hamiltonian(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  std::vector<std::pair<double, PauliString>> terms;
  for (const auto& w : all_logical_words(n)) {
    std::vector<Pauli> letters;
    for (int d : w) letters.push_back(static_cast<Pauli>(d));
    terms.push_back({gauss(rng), PauliString(std::move(letters))});
  }
  Observable h(n, terms);
  return h * (1.0 / spectral_norm(h));
}

Observable random_charge(int n, int terms, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  std::vector<std::pair<double, PauliString>> list;
  while (static_cast<int>(list.size()) < terms) {
    PauliString p = random_pauli(n, rng);
    if (p.is_identity()) continue;
    list.push_back({gauss(rng), p});
  }
  Observable q(n, list);
  return q * (1.0 / spectral_norm(q));
}

Matrix random_density(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Matrix g(dim, dim);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) g(r, c) = cplx(gauss(rng), gauss(rng));
  }
  Matrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

ThermoSystem random_system(int n, int c, std::mt19937_64& rng) {
  ThermoSystem sys;
  sys.hamiltonian = random_hamiltonian(n, rng);
  const Matrix rho = random_density(1 << n, rng);
  for (int i = 0; i < c; ++i) {
    sys.charges.push_back(random_charge(n, 3, rng));
    sys.targets.push_back(expectation(sys.charges.back(), rho));
  }
  sys.label = "random";
  return sys;
}

}  // namespace qthermo
