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

#include "qthermo/operators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include <fmt/format.h>

#include "qthermo/error.hpp"

namespace qthermo {
namespace {

constexpr double kTraceTolerance = 1e-9;
constexpr double kImagTolerance = 1e-10;

// Product of single letters a*b = i^phase * letter.
struct LetterProduct {
  Pauli letter;
  int phase;
};

LetterProduct multiply_letters(Pauli a, Pauli b) {
  if (a == Pauli::I) return {b, 0};
  if (b == Pauli::I) return {a, 0};
  if (a == b) return {Pauli::I, 0};
  // X=1, Y=2, Z=3; cyclic order X->Y->Z gives +i.
  int ia = static_cast<int>(a);
  int ib = static_cast<int>(b);
  int ic = 6 - ia - ib;
  bool cyclic = (ib - ia + 3) % 3 == 1;
  return {static_cast<Pauli>(ic), cyclic ? 1 : 3};
}

char letter_char(Pauli p) {
  static constexpr char kChars[] = {'I', 'X', 'Y', 'Z'};
  return kChars[static_cast<int>(p)];
}

const cplx kPhases[4] = {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};

void check_dense_size(int n) {
  if (n > kMaxDenseQubits) {
    throw ResourceError(
        fmt::format("dense operator on {} qubits exceeds the {}-qubit limit", n, kMaxDenseQubits));
  }
}

// Adds coefficient * P to m, where P is the unsigned Pauli word.
void accumulate_word(Matrix& m, const PauliString& p, cplx coefficient) {
  const int n = p.size();
  std::uint64_t xmask = 0;
  std::uint64_t zmask = 0;
  int ny = 0;
  for (int s = 0; s < n; ++s) {
    std::uint64_t bit = std::uint64_t{1} << (n - 1 - s);
    Pauli l = p.letter(s);
    if (l == Pauli::X || l == Pauli::Y) xmask |= bit;
    if (l == Pauli::Z || l == Pauli::Y) zmask |= bit;
    if (l == Pauli::Y) ++ny;
  }
  // Y = iXZ, so P|b> = i^ny (-1)^{|b & z|} |b ^ x>.
  const cplx base = coefficient * kPhases[(ny + p.phase()) % 4];
  const std::int64_t dim = std::int64_t{1} << n;
  for (std::int64_t b = 0; b < dim; ++b) {
    const std::int64_t row = b ^ static_cast<std::int64_t>(xmask);
    const bool odd = std::popcount(static_cast<std::uint64_t>(b) & zmask) & 1;
    m(row, b) += odd ? -base : base;
  }
}

}  // namespace

PauliString::PauliString(std::vector<Pauli> letters, int phase)
    : letters_(std::move(letters)), phase_(((phase % 4) + 4) % 4) {
  if (letters_.empty()) throw StructuralError("Pauli string must act on at least one qubit");
}

PauliString PauliString::identity(int n) {
  if (n < 1) throw StructuralError("Pauli string must act on at least one qubit");
  return PauliString(std::vector<Pauli>(n, Pauli::I));
}

PauliString PauliString::single(int n, int site, Pauli p) {
  if (site < 0 || site >= n) throw StructuralError(fmt::format("site {} outside 0..{}", site, n - 1));
  std::vector<Pauli> letters(n, Pauli::I);
  letters[site] = p;
  return PauliString(std::move(letters));
}

PauliString PauliString::parse(std::string_view text) {
  int phase = 0;
  std::size_t pos = 0;
  if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
    if (text[pos] == '-') phase = 2;
    ++pos;
  }
  if (pos < text.size() && text[pos] == 'i') {
    phase += 1;
    ++pos;
  }
  std::vector<Pauli> letters;
  for (; pos < text.size(); ++pos) {
    switch (text[pos]) {
      case 'I': letters.push_back(Pauli::I); break;
      case 'X': letters.push_back(Pauli::X); break;
      case 'Y': letters.push_back(Pauli::Y); break;
      case 'Z': letters.push_back(Pauli::Z); break;
      default:
        throw StructuralError(fmt::format("invalid Pauli word '{}'", text));
    }
  }
  if (letters.empty()) throw StructuralError(fmt::format("invalid Pauli word '{}'", text));
  return PauliString(std::move(letters), phase);
}

PauliString PauliString::unsigned_word() const { return PauliString(letters_, 0); }

PauliString PauliString::with_phase(int phase) const { return PauliString(letters_, phase); }

bool PauliString::is_identity() const {
  return std::all_of(letters_.begin(), letters_.end(), [](Pauli p) { return p == Pauli::I; });
}

int PauliString::weight() const {
  return static_cast<int>(
      std::count_if(letters_.begin(), letters_.end(), [](Pauli p) { return p != Pauli::I; }));
}

std::string PauliString::word() const {
  std::string s;
  s.reserve(letters_.size());
  for (Pauli p : letters_) s.push_back(letter_char(p));
  return s;
}

std::string PauliString::str() const {
  static constexpr const char* kPrefix[] = {"+", "+i", "-", "-i"};
  return kPrefix[phase_] + word();
}

Matrix PauliString::dense() const {
  check_dense_size(size());
  const std::int64_t dim = std::int64_t{1} << size();
  Matrix m = Matrix::Zero(dim, dim);
  accumulate_word(m, *this, cplx(1, 0));
  return m;
}

PauliString pauli_product(const PauliString& a, const PauliString& b) {
  if (a.size() != b.size()) {
    throw StructuralError(
        fmt::format("Pauli product of strings with lengths {} and {}", a.size(), b.size()));
  }
  std::vector<Pauli> letters(a.size());
  int phase = a.phase() + b.phase();
  for (int s = 0; s < a.size(); ++s) {
    LetterProduct lp = multiply_letters(a.letter(s), b.letter(s));
    letters[s] = lp.letter;
    phase += lp.phase;
  }
  return PauliString(std::move(letters), phase);
}

bool commutes(const PauliString& a, const PauliString& b) {
  return pauli_product(a, b).phase() == pauli_product(b, a).phase();
}

PauliString tensor(const PauliString& a, const PauliString& b) {
  std::vector<Pauli> letters = a.letters();
  letters.insert(letters.end(), b.letters().begin(), b.letters().end());
  return PauliString(std::move(letters), a.phase() + b.phase());
}

Observable::Observable(int num_qubits) : num_qubits_(num_qubits) {
  if (num_qubits < 1) throw StructuralError("observable must act on at least one qubit");
}

Observable::Observable(int num_qubits, const std::vector<std::pair<double, PauliString>>& terms)
    : Observable(num_qubits) {
  terms_.reserve(terms.size());
  for (const auto& [c, p] : terms) {
    if (p.size() != num_qubits) {
      throw StructuralError(
          fmt::format("term {} has {} sites, expected {}", p.str(), p.size(), num_qubits));
    }
    if (!p.hermitian()) {
      throw StructuralError(fmt::format("term {} has an imaginary phase", p.str()));
    }
    terms_.push_back({p.phase() == 2 ? -c : c, p.unsigned_word()});
  }
  canonicalize();
}

Observable Observable::from_pauli(const PauliString& p, double coefficient) {
  return Observable(p.size(), {{coefficient, p}});
}

Observable Observable::identity(int num_qubits, double coefficient) {
  return from_pauli(PauliString::identity(num_qubits), coefficient);
}

void Observable::canonicalize() {
  std::stable_sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) {
    return a.word.letters() < b.word.letters();
  });
  std::vector<Term> merged;
  for (const Term& t : terms_) {
    if (!merged.empty() && merged.back().word == t.word) {
      merged.back().coefficient += t.coefficient;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [](const Term& t) { return t.coefficient == 0.0; });
  terms_ = std::move(merged);
}

Observable Observable::operator+(const Observable& other) const {
  if (other.num_qubits_ != num_qubits_) {
    throw StructuralError(
        fmt::format("adding observables on {} and {} qubits", num_qubits_, other.num_qubits_));
  }
  Observable out(num_qubits_);
  out.terms_ = terms_;
  out.terms_.insert(out.terms_.end(), other.terms_.begin(), other.terms_.end());
  out.canonicalize();
  return out;
}

Observable Observable::operator-(const Observable& other) const { return *this + other * -1.0; }

Observable Observable::operator*(double s) const {
  Observable out(num_qubits_);
  out.terms_ = terms_;
  for (Term& t : out.terms_) t.coefficient *= s;
  out.canonicalize();
  return out;
}

Observable operator*(double s, const Observable& obs) { return obs * s; }

const Matrix& Observable::dense() const {
  check_dense_size(num_qubits_);
  std::call_once(cache_->once, [this] {
    const std::int64_t dim = dimension();
    Matrix m = Matrix::Zero(dim, dim);
    for (const Term& t : terms_) accumulate_word(m, t.word, cplx(t.coefficient, 0));
    cache_->matrix = std::move(m);
  });
  return cache_->matrix;
}

std::string Observable::str() const {
  if (terms_.empty()) return "0";
  std::string s;
  for (const Term& t : terms_) {
    if (!s.empty()) s += " + ";
    s += fmt::format("{:.17g}*{}", t.coefficient, t.word.word());
  }
  return s;
}

bool Observable::operator==(const Observable& other) const {
  if (num_qubits_ != other.num_qubits_ || terms_.size() != other.terms_.size()) return false;
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    if (terms_[k].coefficient != other.terms_[k].coefficient) return false;
    if (!(terms_[k].word == other.terms_[k].word)) return false;
  }
  return true;
}

double hermiticity_error(const Matrix& a) { return (a - a.adjoint()).cwiseAbs().maxCoeff(); }

double expectation(const Matrix& a, const Matrix& rho) {
  if (a.rows() != rho.rows() || a.cols() != rho.cols()) {
    throw StructuralError("operator and state dimensions differ");
  }
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if (hermiticity_error(a) > 1e-12 * scale) {
    throw NumericalError("expectation of a non-Hermitian operator");
  }
  const cplx tr = rho.trace();
  if (std::abs(tr - cplx(1, 0)) > kTraceTolerance) {
    throw NumericalError(fmt::format("density matrix trace {} differs from 1", tr.real()));
  }
  // Tr[A rho] = sum_ij A_ij rho_ji
  const cplx value = (a.transpose().cwiseProduct(rho)).sum();
  if (std::abs(value.imag()) > kImagTolerance * scale) {
    throw NumericalError(fmt::format("expectation has imaginary residue {}", value.imag()));
  }
  return value.real();
}

double expectation(const Observable& obs, const Matrix& rho) { return expectation(obs.dense(), rho); }

cplx pauli_expectation(const PauliString& p, const Matrix& rho) {
  const int n = p.size();
  if (rho.rows() != (std::int64_t{1} << n)) throw StructuralError("Pauli word and state dimensions differ");
  std::uint64_t xmask = 0;
  std::uint64_t zmask = 0;
  int ny = 0;
  for (int s = 0; s < n; ++s) {
    std::uint64_t bit = std::uint64_t{1} << (n - 1 - s);
    Pauli l = p.letter(s);
    if (l == Pauli::X || l == Pauli::Y) xmask |= bit;
    if (l == Pauli::Z || l == Pauli::Y) zmask |= bit;
    if (l == Pauli::Y) ++ny;
  }
  // Tr[P rho] = sum_c <c^x|P|c> rho(c, c^x)
  cplx sum(0, 0);
  const std::int64_t dim = rho.rows();
  for (std::int64_t c = 0; c < dim; ++c) {
    const bool odd = std::popcount(static_cast<std::uint64_t>(c) & zmask) & 1;
    const cplx v = rho(c, c ^ static_cast<std::int64_t>(xmask));
    sum += odd ? -v : v;
  }
  return sum * kPhases[(ny + p.phase()) % 4];
}

double spectral_norm(const Observable& obs) {
  if (obs.empty()) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(obs.dense(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace qthermo
