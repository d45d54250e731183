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

#ifndef QTHERMO_MODELS_HPP_
#define QTHERMO_MODELS_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "qthermo/operators.hpp"

namespace qthermo {

struct Edge {
  int i;
  int j;
  double coupling;
};

class CouplingGraph {
 public:
  CouplingGraph(int vertex_count, std::vector<Edge> edges);

  int vertex_count() const { return vertex_count_; }
  const std::vector<Edge>& edges() const { return edges_; }

 private:
  int vertex_count_;
  std::vector<Edge> edges_;
};

/**
 * @brief Hamiltonian, charge tuple and constraint targets.
 *
 * The thermal state family is exp(-(H - mu.Q)/T)/Z.
 */
struct ThermoSystem {
  Observable hamiltonian;
  std::vector<Observable> charges;
  std::vector<double> targets;
  std::string label;
  bool conserved = false;
  // Charges are sums of single-site X, Y, Z in that order (Heisenberg form).
  bool extensive = false;

  int num_qubits() const { return hamiltonian.num_qubits(); }
  int num_charges() const { return static_cast<int>(charges.size()); }
  Vector target_vector() const;

  // Checks sizes, Hermiticity and, when `conserved` is set, [H, Q_i] = 0.
  void validate() const;
};

enum class Geometry { kLine, kGrid };

struct HeisenbergSpec {
  Geometry geometry = Geometry::kLine;
  int n = 3;      // line length
  int rows = 2;   // grid only
  int cols = 2;   // grid only
  bool nnn = false;
  double J = 1.0;
  double lambda = 0.5;
};

// Open-boundary lattice adjacency with next-to-nearest pairs weighted by lambda*J.
CouplingGraph heisenberg_graph(const HeisenbergSpec& spec);
ThermoSystem build_heisenberg(const HeisenbergSpec& spec, const std::vector<double>& targets);
// X_tot, Y_tot, Z_tot on n qubits.
std::vector<Observable> total_magnetizations(int n);

struct StabilizerCode {
  std::string name;
  int n = 0;
  int k = 0;
  std::vector<PauliString> stabilizers;
  std::vector<PauliString> logical_x;
  std::vector<PauliString> logical_z;

  // Throws StructuralError when a code invariant fails.
  void validate() const;
};

StabilizerCode builtin_code(std::string_view name);
std::vector<std::string> builtin_code_names();

// Logical Pauli product over {0,1,2,3}^k where 0=I, 1=X, 2=Y, 3=Z and
// Y_i = i X_i Z_i. The result is Hermitian with phase +1 or -1.
PauliString logical_pauli_product(const StabilizerCode& code, const std::vector<int>& indices);
// Parses a digit word such as "22"; throws ConfigError on bad digits or length.
std::vector<int> parse_logical_word(std::string_view word, int k);
std::string logical_word_string(const std::vector<int>& indices);
// All 4^k index tuples in lexicographic order, identity first.
std::vector<std::vector<int>> all_logical_words(int k);

struct ChargeSpec {
  std::vector<int> word;
  double target;
};

// H = -sum_i gamma_i S_i with charges given by logical Pauli products.
ThermoSystem build_stabilizer_system(const StabilizerCode& code,
                                     const std::vector<ChargeSpec>& charges,
                                     const std::vector<double>& gammas = {});

// prod_i (I + S_i)/2
Matrix codespace_projector(const StabilizerCode& code);

// Max-abs entry of [A, B].
double commutator_norm(const Matrix& a, const Matrix& b);

}  // namespace qthermo

#endif  // QTHERMO_MODELS_HPP_
