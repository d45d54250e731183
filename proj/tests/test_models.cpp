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

#include <cstdlib>
#include <set>
#include <utility>

#include <gtest/gtest.h>

#include "qthermo/error.hpp"
#include "qthermo/models.hpp"
#include "test_util.hpp"

namespace qthermo {
namespace {

using testing::kron_word;
using testing::max_abs;
using testing::oracle_dense;

double lambda_min(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

HeisenbergSpec line(int n, bool nnn = false) {
  HeisenbergSpec s;
  s.geometry = Geometry::kLine;
  s.n = n;
  s.nnn = nnn;
  return s;
}

HeisenbergSpec grid(int rows, int cols, bool nnn = false) {
  HeisenbergSpec s;
  s.geometry = Geometry::kGrid;
  s.rows = rows;
  s.cols = cols;
  s.nnn = nnn;
  return s;
}

std::set<std::pair<int, int>> edge_set(const CouplingGraph& g) {
  std::set<std::pair<int, int>> out;
  for (const Edge& e : g.edges()) out.insert({std::min(e.i, e.j), std::max(e.i, e.j)});
  return out;
}

TEST(Heisenberg, TwoSiteGroundEnergy) {
  const ThermoSystem sys = build_heisenberg(line(2), {0, 0, 0});
  // Singlet energy of XX + YY + ZZ.
  EXPECT_NEAR(lambda_min(oracle_dense(sys.hamiltonian)), -3.0, 1e-12);
}

TEST(Heisenberg, DenseMatchesKroneckerSum) {
  const ThermoSystem sys = build_heisenberg(line(3, true), {0, 0, 0});
  Matrix expected = Matrix::Zero(8, 8);
  for (const char* p : {"XXI", "YYI", "ZZI", "IXX", "IYY", "IZZ"}) expected += kron_word(p);
  for (const char* p : {"XIX", "YIY", "ZIZ"}) expected += 0.5 * kron_word(p);
  EXPECT_LE(max_abs(sys.hamiltonian.dense() - expected), 1e-15);
}

TEST(Heisenberg, ChargesCommuteExactly) {
  for (const HeisenbergSpec& spec : {line(3), line(5, true), grid(2, 2, true), grid(2, 3), grid(2, 3, true)}) {
    const ThermoSystem sys = build_heisenberg(spec, {1, 0, 1});
    EXPECT_TRUE(sys.conserved);
    for (const Observable& q : sys.charges) {
      EXPECT_EQ(commutator_norm(sys.hamiltonian.dense(), q.dense()), 0.0) << sys.label;
    }
  }
}

TEST(Heisenberg, GridEdgesMatchBruteForce) {
  for (auto [r, c] : {std::pair{2, 3}, std::pair{3, 3}, std::pair{2, 2}}) {
    for (bool nnn : {false, true}) {
      std::set<std::pair<int, int>> nn;
      std::set<std::pair<int, int>> diag;
      for (int a = 0; a < r * c; ++a) {
        for (int b = a + 1; b < r * c; ++b) {
          const int dr = std::abs(a / c - b / c);
          const int dc = std::abs(a % c - b % c);
          if (dr + dc == 1) nn.insert({a, b});
          if (dr == 1 && dc == 1) diag.insert({a, b});
        }
      }
      std::set<std::pair<int, int>> expected = nn;
      if (nnn) expected.insert(diag.begin(), diag.end());
      const CouplingGraph g = heisenberg_graph(grid(r, c, nnn));
      EXPECT_EQ(edge_set(g), expected);
      for (const Edge& e : g.edges()) {
        const bool is_diag = diag.count({std::min(e.i, e.j), std::max(e.i, e.j)}) > 0;
        EXPECT_EQ(e.coupling, is_diag ? 0.5 : 1.0);
      }
    }
  }
  EXPECT_EQ(heisenberg_graph(grid(2, 3)).edges().size(), 7u);
}

TEST(Heisenberg, ChargesAreTotalMagnetizations) {
  const ThermoSystem sys = build_heisenberg(line(4), {0, 0, 0});
  const char* letters = "XYZ";
  for (int a = 0; a < 3; ++a) {
    Matrix expected = Matrix::Zero(16, 16);
    for (int s = 0; s < 4; ++s) {
      std::string w(4, 'I');
      w[s] = letters[a];
      expected += kron_word(w);
    }
    EXPECT_LE(max_abs(sys.charges[a].dense() - expected), 1e-15);
  }
  EXPECT_TRUE(sys.extensive);
}

TEST(Heisenberg, RejectsBadSpecs) {
  EXPECT_THROW(build_heisenberg(line(1), {0, 0, 0}), ConfigError);
  EXPECT_THROW(build_heisenberg(line(3), {0, 0}), ConfigError);
  EXPECT_THROW(build_heisenberg(grid(1, 3, true), {0, 0, 0}), ConfigError);
  HeisenbergSpec bad = line(3);
  bad.lambda = 1.5;
  EXPECT_THROW(build_heisenberg(bad, {0, 0, 0}), ConfigError);
}

TEST(CouplingGraph, Validation) {
  EXPECT_THROW(CouplingGraph(3, {{0, 0, 1.0}}), ConfigError);
  EXPECT_THROW(CouplingGraph(3, {{0, 1, 1.0}, {1, 0, 1.0}}), ConfigError);
  EXPECT_THROW(CouplingGraph(3, {{0, 3, 1.0}}), ConfigError);
  EXPECT_NO_THROW(CouplingGraph(3, {{0, 1, 1.0}, {1, 2, 1.0}}));
}

TEST(Codes, PerfectFiveGeneratorsCommute) {
  const StabilizerCode code = builtin_code("perfect5");
  ASSERT_EQ(code.stabilizers.size(), 4u);
  for (const auto& a : code.stabilizers) {
    for (const auto& b : code.stabilizers) EXPECT_TRUE(commutes(a, b));
  }
}

TEST(Codes, RepetitionLogicalY) {
  const StabilizerCode code = builtin_code("repetition3");
  const PauliString y = logical_pauli_product(code, {2});
  EXPECT_EQ(y.str(), "+YXX");
}

TEST(Codes, DetectLogicalRelations) {
  const StabilizerCode code = builtin_code("detect422");
  const PauliString x1 = logical_pauli_product(code, {1, 0});
  const PauliString z1 = logical_pauli_product(code, {3, 0});
  const PauliString z2 = logical_pauli_product(code, {0, 3});
  EXPECT_FALSE(commutes(x1, z1));
  EXPECT_TRUE(commutes(x1, z2));
}

TEST(Codes, InvariantsHoldForEveryBuiltin) {
  for (const auto& name : builtin_code_names()) {
    const StabilizerCode code = builtin_code(name);
    EXPECT_NO_THROW(code.validate());
    for (const auto& w : all_logical_words(code.k)) {
      const PauliString l = logical_pauli_product(code, w);
      for (const auto& s : code.stabilizers) EXPECT_TRUE(commutes(l, s)) << name;
    }
    for (int i = 0; i < code.k; ++i) {
      for (int j = 0; j < code.k; ++j) {
        EXPECT_EQ(commutes(code.logical_x[i], code.logical_z[j]), i != j) << name;
        EXPECT_TRUE(commutes(code.logical_x[i], code.logical_x[j]));
        EXPECT_TRUE(commutes(code.logical_z[i], code.logical_z[j]));
      }
    }
  }
}

TEST(Codes, BrokenCodeRejected) {
  StabilizerCode code = builtin_code("repetition3");
  code.stabilizers[1] = PauliString::parse("IXI");
  EXPECT_THROW(code.validate(), StructuralError);
  code = builtin_code("repetition3");
  code.logical_z[0] = PauliString::parse("XII");
  EXPECT_THROW(code.validate(), StructuralError);
  EXPECT_THROW(builtin_code("steane7"), ConfigError);
}

TEST(Codes, LogicalProducts) {
  const StabilizerCode code = builtin_code("detect422");
  EXPECT_TRUE(logical_pauli_product(code, {0, 0}).is_identity());
  const PauliString yy = logical_pauli_product(code, {2, 2});
  const Matrix m = oracle_dense(yy);
  EXPECT_LE(testing::max_abs(m - m.adjoint()), 1e-15);
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    EXPECT_NEAR(std::abs(es.eigenvalues()(i)), 1.0, 1e-12);
  }
}

TEST(Codes, ProjectorRepetition) {
  const Matrix p = codespace_projector(builtin_code("repetition3"));
  Matrix expected = Matrix::Zero(8, 8);
  expected(0, 0) = 1.0;
  expected(7, 7) = 1.0;
  EXPECT_LE(max_abs(p - expected), 1e-15);
}

TEST(Codes, ProjectorIdempotentWithTraceTwoToK) {
  for (const auto& name : builtin_code_names()) {
    const StabilizerCode code = builtin_code(name);
    const Matrix p = codespace_projector(code);
    EXPECT_LE(max_abs(p * p - p), 1e-12);
    EXPECT_NEAR(p.trace().real(), std::ldexp(1.0, code.k), 1e-12);
  }
}

TEST(StabilizerSystem, PerfectFiveGroundEnergy) {
  const ThermoSystem sys = build_stabilizer_system(builtin_code("perfect5"), {{{1}, 0.2}, {{2}, 0.0}, {{3}, 0.5}});
  EXPECT_NEAR(lambda_min(oracle_dense(sys.hamiltonian)), -4.0, 1e-12);
  EXPECT_TRUE(sys.conserved);
}

TEST(StabilizerSystem, RepetitionChargesPairwiseAnticommute) {
  const ThermoSystem sys = build_stabilizer_system(builtin_code("repetition3"), {{{1}, 0}, {{2}, 0}, {{3}, 0}});
  ASSERT_EQ(sys.num_charges(), 3);
  for (int a = 0; a < 3; ++a) {
    for (int b = a + 1; b < 3; ++b) {
      EXPECT_GT(commutator_norm(sys.charges[a].dense(), sys.charges[b].dense()), 1.0);
    }
  }
}

TEST(StabilizerSystem, DetectBellTargets) {
  const StabilizerCode code = builtin_code("detect422");
  std::vector<ChargeSpec> charges;
  for (const auto& w : all_logical_words(2)) {
    if (w[0] == 0 && w[1] == 0) continue;
    double target = 0.0;
    if (w[0] == w[1]) target = w[0] == 2 ? -1.0 : 1.0;
    charges.push_back({w, target});
  }
  const ThermoSystem sys = build_stabilizer_system(code, charges);
  EXPECT_EQ(sys.num_charges(), 15);
  for (const auto& q : sys.charges) {
    EXPECT_EQ(commutator_norm(sys.hamiltonian.dense(), q.dense()), 0.0);
  }
}

TEST(StabilizerSystem, RejectsBadWords) {
  const StabilizerCode code = builtin_code("detect422");
  EXPECT_THROW(build_stabilizer_system(code, {{{0, 0}, 0.0}}), ConfigError);
  EXPECT_THROW(build_stabilizer_system(code, {{{1}, 0.0}}), ConfigError);
  EXPECT_THROW(build_stabilizer_system(code, {{{2, 4}, 0.0}}), ConfigError);
  EXPECT_THROW(parse_logical_word("24", 2), ConfigError);
  EXPECT_THROW(parse_logical_word("2", 2), ConfigError);
  EXPECT_EQ(parse_logical_word("31", 2), (std::vector<int>{3, 1}));
  EXPECT_EQ(logical_word_string({3, 1}), "31");
  EXPECT_EQ(all_logical_words(2).size(), 16u);
}

TEST(StabilizerSystem, GeneratorWeights) {
  const StabilizerCode code = builtin_code("repetition3");
  const ThermoSystem sys = build_stabilizer_system(code, {}, {2.0, 3.0});
  Eigen::SelfAdjointEigenSolver<Matrix> es(testing::oracle_dense(sys.hamiltonian));
  EXPECT_NEAR(es.eigenvalues()(0), -5.0, 1e-12);
  EXPECT_THROW(build_stabilizer_system(code, {}, {1.0}), ConfigError);
  EXPECT_THROW(build_stabilizer_system(code, {}, {1.0, -1.0}), ConfigError);
}

}  // namespace
}  // namespace qthermo
