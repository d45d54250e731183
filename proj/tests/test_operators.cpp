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

#include <random>

#include <gtest/gtest.h>

#include "qthermo/error.hpp"
#include "qthermo/operators.hpp"
#include "qthermo/random.hpp"
#include "test_util.hpp"

namespace qthermo {
namespace {

using testing::kron_word;
using testing::max_abs;
using testing::oracle_dense;

TEST(PauliProduct, XTimesYIsIZ) {
  const PauliString p = pauli_product(PauliString::parse("X"), PauliString::parse("Y"));
  EXPECT_EQ(p.word(), "Z");
  EXPECT_EQ(p.phase(), 1);
  EXPECT_EQ(p.str(), "+iZ");
}

TEST(PauliProduct, YTimesXIsMinusIZ) {
  const PauliString p = pauli_product(PauliString::parse("Y"), PauliString::parse("X"));
  EXPECT_EQ(p.word(), "Z");
  EXPECT_EQ(p.phase(), 3);
}

TEST(PauliProduct, SquareIsIdentity) {
  const PauliString xz = PauliString::parse("XZ");
  const PauliString p = pauli_product(xz, xz);
  EXPECT_TRUE(p.is_identity());
  EXPECT_EQ(p.phase(), 0);
}

TEST(PauliProduct, XYTimesYYMatchesDense) {
  const PauliString a = PauliString::parse("XY");
  const PauliString b = PauliString::parse("YY");
  const PauliString p = pauli_product(a, b);
  // XY = iZ on the first site, YY = I on the second.
  EXPECT_EQ(p.word(), "ZI");
  EXPECT_EQ(p.phase(), 1);
  EXPECT_LE(max_abs(oracle_dense(p) - kron_word("XY") * kron_word("YY")), 1e-12);
}

TEST(PauliString, ParseAndPrintRoundTrip) {
  for (const char* text : {"+XIZ", "-YY", "+iZ", "-iXYZI"}) {
    EXPECT_EQ(PauliString::parse(text).str(), text);
  }
  EXPECT_EQ(PauliString::parse("XZ").str(), "+XZ");
  EXPECT_THROW(PauliString::parse("XQ"), StructuralError);
  EXPECT_THROW(PauliString::parse(""), StructuralError);
}

TEST(PauliString, SingleSiteIsMostSignificant) {
  const PauliString p = PauliString::single(3, 0, Pauli::X);
  EXPECT_EQ(p.word(), "XII");
  // X on site 0 flips the leading bit: |000> -> |100>.
  EXPECT_EQ(p.dense()(4, 0), cplx(1.0, 0.0));
}

TEST(PauliString, DenseMatchesKroneckerOracle) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 4;
    const PauliString p = random_pauli(n, rng).with_phase(trial % 4);
    EXPECT_LE(max_abs(p.dense() - oracle_dense(p)), 1e-15) << p.str();
  }
}

TEST(PauliString, TensorConcatenates) {
  const PauliString t = tensor(PauliString::parse("-X"), PauliString::parse("iZY"));
  EXPECT_EQ(t.word(), "XZY");
  EXPECT_EQ(t.phase(), 3);
}

TEST(PauliProperty, ProductMatchesDenseProduct) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + trial % 5;
    const PauliString a = random_pauli(n, rng).with_phase(trial % 4);
    const PauliString b = random_pauli(n, rng).with_phase((trial / 4) % 4);
    const Matrix expected = oracle_dense(a) * oracle_dense(b);
    EXPECT_LE(max_abs(oracle_dense(pauli_product(a, b)) - expected), 1e-12) << a.str() << " " << b.str();
  }
}

TEST(PauliProperty, CommutationMatchesPhaseComparison) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + trial % 5;
    const PauliString a = random_pauli(n, rng);
    const PauliString b = random_pauli(n, rng);
    const bool by_phase = pauli_product(a, b).phase() == pauli_product(b, a).phase();
    EXPECT_EQ(commutes(a, b), by_phase);
    const Matrix da = oracle_dense(a);
    const Matrix db = oracle_dense(b);
    EXPECT_EQ(commutes(a, b), max_abs(da * db - db * da) < 1e-12);
  }
}

TEST(Observable, SingleZIsDiagonal) {
  const Observable z = Observable::from_pauli(PauliString::parse("Z"));
  Matrix expected(2, 2);
  expected << 1, 0, 0, -1;
  EXPECT_EQ(z.dense(), expected);
}

TEST(Observable, EmptyIsZero) {
  const Observable empty(2);
  EXPECT_TRUE(empty.empty());
  EXPECT_EQ(empty.dense(), Matrix::Zero(4, 4));
}

TEST(Observable, HeisenbergPairSpectrum) {
  const Observable h(2, {{1.0, PauliString::parse("XX")}, {1.0, PauliString::parse("YY")},
                         {1.0, PauliString::parse("ZZ")}});
  Eigen::SelfAdjointEigenSolver<Matrix> es(oracle_dense(h));
  const Eigen::Vector4d expected(-3, 1, 1, 1);
  EXPECT_LE((es.eigenvalues() - expected).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE(max_abs(h.dense() - oracle_dense(h)), 1e-15);
  EXPECT_NEAR(spectral_norm(h), 3.0, 1e-12);
}

TEST(Observable, CanonicalFormIsStructural) {
  const PauliString x = PauliString::parse("XI");
  const PauliString z = PauliString::parse("IZ");
  const Observable a(2, {{1.0, x}, {2.0, z}});
  const Observable b(2, {{2.0, z}, {0.5, x}, {0.5, x}});
  EXPECT_EQ(a, b);
  EXPECT_TRUE((a - b).empty());
  const Observable neg(2, {{1.0, PauliString::parse("-XI")}});
  EXPECT_EQ(neg, Observable::from_pauli(x, -1.0));
  EXPECT_THROW(Observable(2, {{1.0, PauliString::parse("iXI")}}), StructuralError);
  EXPECT_THROW(Observable(2, {{1.0, PauliString::parse("XII")}}), StructuralError);
}

TEST(Observable, ArithmeticMatchesDense) {
  std::mt19937_64 rng(4);
  const Observable a = random_charge(3, 4, rng);
  const Observable b = random_charge(3, 4, rng);
  EXPECT_LE(max_abs((a + 2.0 * b).dense() - (a.dense() + 2.0 * b.dense())), 1e-14);
  EXPECT_LE(max_abs((a * -0.5).dense() + 0.5 * a.dense()), 1e-15);
}

TEST(Observable, DenseLimitEnforced) {
  const Observable big = Observable::identity(kMaxDenseQubits + 1);
  EXPECT_THROW(big.dense(), ResourceError);
}

TEST(Observable, CopiesShareCache) {
  const Observable a = Observable::from_pauli(PauliString::parse("XY"));
  const Observable b = a;
  EXPECT_EQ(&a.dense(), &b.dense());
}

TEST(Expectation, ZOnZeroState) {
  Matrix rho = Matrix::Zero(2, 2);
  rho(0, 0) = 1.0;
  EXPECT_EQ(expectation(Observable::from_pauli(PauliString::parse("Z")), rho), 1.0);
}

TEST(Expectation, TracelessPaulisVanishOnMaximallyMixed) {
  std::mt19937_64 rng(5);
  for (int n = 1; n <= 4; ++n) {
    const Matrix mixed = Matrix::Identity(1 << n, 1 << n) / static_cast<double>(1 << n);
    for (int trial = 0; trial < 20; ++trial) {
      const PauliString p = random_pauli(n, rng);
      if (p.is_identity()) continue;
      EXPECT_EQ(expectation(Observable::from_pauli(p), mixed), 0.0);
    }
  }
}

TEST(Expectation, TotalXMatchesLoopTrace) {
  std::mt19937_64 rng(6);
  Observable xtot(3);
  for (int s = 0; s < 3; ++s) xtot = xtot + Observable::from_pauli(PauliString::single(3, s, Pauli::X));
  const Matrix rho = random_density(8, rng);
  EXPECT_NEAR(expectation(xtot, rho), testing::loop_trace(oracle_dense(xtot), rho), 1e-12);
}

TEST(Expectation, PauliExpectationMatchesDense) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 4;
    const Matrix rho = random_density(1 << n, rng);
    const PauliString p = random_pauli(n, rng).with_phase(trial % 4);
    cplx expected = (oracle_dense(p) * rho).trace();
    EXPECT_LE(std::abs(pauli_expectation(p, rho) - expected), 1e-12);
  }
}

TEST(Expectation, LinearInObservable) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 30; ++trial) {
    const Observable a = random_charge(3, 3, rng);
    const Observable b = random_charge(3, 5, rng);
    const Matrix rho = random_density(8, rng);
    const double alpha = gauss(rng);
    const double beta = gauss(rng);
    EXPECT_NEAR(expectation(a * alpha + b * beta, rho), alpha * expectation(a, rho) + beta * expectation(b, rho),
                1e-12);
  }
}

TEST(Expectation, RejectsBadInputs) {
  const Matrix not_normalized = Matrix::Identity(2, 2);
  EXPECT_THROW(expectation(Observable::from_pauli(PauliString::parse("Z")), not_normalized), NumericalError);
  Matrix rho = Matrix::Identity(2, 2) / 2.0;
  Matrix non_hermitian = Matrix::Zero(2, 2);
  non_hermitian(0, 1) = 1.0;
  EXPECT_THROW(expectation(non_hermitian, rho), NumericalError);
  EXPECT_THROW(expectation(Observable::from_pauli(PauliString::parse("ZZ")), rho), StructuralError);
}

}  // namespace
}  // namespace qthermo
