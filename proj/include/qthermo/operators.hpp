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

#ifndef QTHERMO_OPERATORS_HPP_
#define QTHERMO_OPERATORS_HPP_

#include <complex>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qthermo {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Largest register for which dense matrices are built.
inline constexpr int kMaxDenseQubits = 10;

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

/**
 * @brief Signed tensor product of single-qubit Pauli operators.
 *
 * The global phase is i^phase with phase in {0,1,2,3}. Site 0 is the
 * leftmost tensor factor, i.e. the most significant bit of a basis index.
 */
class PauliString {
 public:
  PauliString() = default;
  PauliString(std::vector<Pauli> letters, int phase = 0);

  // Identity on n sites.
  static PauliString identity(int n);
  // Single letter p on site `site` of an n-site register.
  static PauliString single(int n, int site, Pauli p);
  // Parses "[+|-][i]XIZY"; whitespace is not allowed.
  static PauliString parse(std::string_view text);

  int size() const { return static_cast<int>(letters_.size()); }
  int phase() const { return phase_; }
  const std::vector<Pauli>& letters() const { return letters_; }
  Pauli letter(int site) const { return letters_[site]; }

  // Same letters with phase reset to +1.
  PauliString unsigned_word() const;
  PauliString with_phase(int phase) const;

  bool is_identity() const;
  // True when the phase is real (+1 or -1), i.e. the operator is Hermitian.
  bool hermitian() const { return phase_ % 2 == 0; }
  int weight() const;

  // Letters only, e.g. "XIZ".
  std::string word() const;
  // Full text form with sign, e.g. "-XIZ" or "+iYY".
  std::string str() const;

  Matrix dense() const;

  bool operator==(const PauliString& other) const = default;

 private:
  std::vector<Pauli> letters_;
  int phase_ = 0;
};

PauliString pauli_product(const PauliString& a, const PauliString& b);
bool commutes(const PauliString& a, const PauliString& b);
// Tensor product a (x) b.
PauliString tensor(const PauliString& a, const PauliString& b);

/**
 * @brief Real linear combination of Hermitian Pauli words.
 *
 * Terms are kept sorted lexicographically by word with duplicates merged,
 * so two observables describing the same operator compare equal. The dense
 * matrix is built once on demand and shared between copies.
 */
class Observable {
 public:
  struct Term {
    double coefficient;
    PauliString word;  // phase always +1
  };

  Observable() = default;
  explicit Observable(int num_qubits);
  Observable(int num_qubits, const std::vector<std::pair<double, PauliString>>& terms);

  static Observable from_pauli(const PauliString& p, double coefficient = 1.0);
  static Observable identity(int num_qubits, double coefficient = 1.0);

  int num_qubits() const { return num_qubits_; }
  std::int64_t dimension() const { return std::int64_t{1} << num_qubits_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  Observable operator+(const Observable& other) const;
  Observable operator-(const Observable& other) const;
  Observable operator*(double s) const;

  // Dense 2^n x 2^n matrix. Throws ResourceError above kMaxDenseQubits.
  const Matrix& dense() const;

  std::string str() const;

  bool operator==(const Observable& other) const;

 private:
  struct Cache {
    std::once_flag once;
    Matrix matrix;
  };

  void canonicalize();

  int num_qubits_ = 0;
  std::vector<Term> terms_;
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

Observable operator*(double s, const Observable& obs);

// Largest absolute entry of A - A^dagger.
double hermiticity_error(const Matrix& a);

// Tr[A rho] for a Hermitian A. Checks the trace of rho and the imaginary
// residue of the result.
double expectation(const Matrix& a, const Matrix& rho);
double expectation(const Observable& obs, const Matrix& rho);
// Tr[P rho] for a single Pauli word, computed in O(2^n) without a dense P.
cplx pauli_expectation(const PauliString& p, const Matrix& rho);

// Largest absolute eigenvalue.
double spectral_norm(const Observable& obs);

}  // namespace qthermo

#endif  // QTHERMO_OPERATORS_HPP_
