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

#include "qthermo/models.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include <fmt/format.h>

#include "qthermo/error.hpp"

namespace qthermo {
namespace {

constexpr double kCommutatorTolerance = 1e-12;

std::vector<PauliString> parse_all(std::initializer_list<const char*> words) {
  std::vector<PauliString> out;
  for (const char* w : words) out.push_back(PauliString::parse(w));
  return out;
}

}  // namespace

CouplingGraph::CouplingGraph(int vertex_count, std::vector<Edge> edges)
    : vertex_count_(vertex_count), edges_(std::move(edges)) {
  if (vertex_count < 1) throw ConfigError("graph needs at least one vertex");
  std::set<std::pair<int, int>> seen;
  for (const Edge& e : edges_) {
    if (e.i < 0 || e.j < 0 || e.i >= vertex_count || e.j >= vertex_count) {
      throw ConfigError(fmt::format("edge ({}, {}) outside 0..{}", e.i, e.j, vertex_count - 1));
    }
    if (e.i == e.j) throw ConfigError(fmt::format("self-loop at vertex {}", e.i));
    auto key = std::minmax(e.i, e.j);
    if (!seen.insert(key).second) {
      throw ConfigError(fmt::format("duplicate edge ({}, {})", e.i, e.j));
    }
  }
}

Vector ThermoSystem::target_vector() const {
  return Eigen::Map<const Vector>(targets.data(), static_cast<Eigen::Index>(targets.size()));
}

void ThermoSystem::validate() const {
  const int n = num_qubits();
  if (targets.size() != charges.size()) {
    throw ConfigError(fmt::format("{} targets given for {} charges", targets.size(), charges.size()));
  }
  for (const Observable& q : charges) {
    if (q.num_qubits() != n) throw ConfigError("charge and Hamiltonian act on different registers");
  }
  if (hermiticity_error(hamiltonian.dense()) > kCommutatorTolerance) {
    throw NumericalError("Hamiltonian is not Hermitian");
  }
  for (const Observable& q : charges) {
    if (hermiticity_error(q.dense()) > kCommutatorTolerance) {
      throw NumericalError("charge is not Hermitian");
    }
    if (conserved && commutator_norm(hamiltonian.dense(), q.dense()) > kCommutatorTolerance) {
      throw NumericalError(fmt::format("charge {} does not commute with H", q.str()));
    }
  }
}

CouplingGraph heisenberg_graph(const HeisenbergSpec& spec) {
  if (spec.lambda < 0.0 || spec.lambda > 1.0) {
    throw ConfigError(fmt::format("lambda = {} outside [0, 1]", spec.lambda));
  }
  std::vector<Edge> edges;
  const double nnn = spec.lambda * spec.J;
  if (spec.geometry == Geometry::kLine) {
    if (spec.n < 2) throw ConfigError("Heisenberg chain needs n >= 2");
    for (int i = 0; i + 1 < spec.n; ++i) edges.push_back({i, i + 1, spec.J});
    if (spec.nnn) {
      for (int i = 0; i + 2 < spec.n; ++i) edges.push_back({i, i + 2, nnn});
    }
    return CouplingGraph(spec.n, std::move(edges));
  }
  const int r = spec.rows;
  const int c = spec.cols;
  if (r < 1 || c < 1 || r * c < 2) throw ConfigError("Heisenberg grid needs at least two sites");
  if (spec.nnn && (r < 2 || c < 2)) {
    throw ConfigError("diagonal neighbors need a grid with at least 2 rows and 2 columns");
  }
  auto site = [c](int row, int col) { return row * c + col; };
  for (int row = 0; row < r; ++row) {
    for (int col = 0; col + 1 < c; ++col) edges.push_back({site(row, col), site(row, col + 1), spec.J});
  }
  for (int row = 0; row + 1 < r; ++row) {
    for (int col = 0; col < c; ++col) edges.push_back({site(row, col), site(row + 1, col), spec.J});
  }
  if (spec.nnn) {
    for (int row = 0; row + 1 < r; ++row) {
      for (int col = 0; col + 1 < c; ++col) {
        edges.push_back({site(row, col), site(row + 1, col + 1), nnn});
        edges.push_back({site(row, col + 1), site(row + 1, col), nnn});
      }
    }
  }
  return CouplingGraph(r * c, std::move(edges));
}

std::vector<Observable> total_magnetizations(int n) {
  std::vector<Observable> out;
  for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) {
    std::vector<std::pair<double, PauliString>> terms;
    for (int s = 0; s < n; ++s) terms.push_back({1.0, PauliString::single(n, s, p)});
    out.emplace_back(n, terms);
  }
  return out;
}

ThermoSystem build_heisenberg(const HeisenbergSpec& spec, const std::vector<double>& targets) {
  CouplingGraph graph = heisenberg_graph(spec);
  const int n = graph.vertex_count();
  std::vector<std::pair<double, PauliString>> terms;
  for (const Edge& e : graph.edges()) {
    for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) {
      std::vector<Pauli> letters(n, Pauli::I);
      letters[e.i] = p;
      letters[e.j] = p;
      terms.push_back({e.coupling, PauliString(std::move(letters))});
    }
  }
  ThermoSystem sys;
  sys.hamiltonian = Observable(n, terms);
  sys.charges = total_magnetizations(n);
  sys.targets = targets;
  sys.conserved = true;
  sys.extensive = true;
  if (spec.geometry == Geometry::kLine) {
    sys.label = fmt::format("heisenberg_line_n{}{}", n, spec.nnn ? "_nnn" : "");
  } else {
    sys.label = fmt::format("heisenberg_grid_{}x{}{}", spec.rows, spec.cols, spec.nnn ? "_nnn" : "");
  }
  if (targets.size() != 3) {
    throw ConfigError(fmt::format("Heisenberg model takes 3 targets, got {}", targets.size()));
  }
  sys.validate();
  return sys;
}

void StabilizerCode::validate() const {
  if (n < 1 || k < 0 || static_cast<int>(stabilizers.size()) != n - k) {
    throw StructuralError(fmt::format("code {} needs {} generators", name, n - k));
  }
  if (static_cast<int>(logical_x.size()) != k || static_cast<int>(logical_z.size()) != k) {
    throw StructuralError(fmt::format("code {} needs {} logical pairs", name, k));
  }
  auto check_len = [&](const PauliString& p) {
    if (p.size() != n) throw StructuralError(fmt::format("{} has wrong length", p.str()));
  };
  for (const auto& s : stabilizers) check_len(s);
  for (const auto& s : logical_x) check_len(s);
  for (const auto& s : logical_z) check_len(s);
  for (std::size_t a = 0; a < stabilizers.size(); ++a) {
    for (std::size_t b = a + 1; b < stabilizers.size(); ++b) {
      if (!commutes(stabilizers[a], stabilizers[b])) {
        throw StructuralError(fmt::format("generators {} and {} anticommute",
                                          stabilizers[a].str(), stabilizers[b].str()));
      }
    }
  }
  for (int i = 0; i < k; ++i) {
    for (const auto& s : stabilizers) {
      if (!commutes(logical_x[i], s) || !commutes(logical_z[i], s)) {
        throw StructuralError(fmt::format("logical operator of qubit {} leaves the normalizer", i));
      }
    }
    for (int j = 0; j < k; ++j) {
      if (!commutes(logical_x[i], logical_x[j]) || !commutes(logical_z[i], logical_z[j])) {
        throw StructuralError("logical operators of the same type must commute");
      }
      if (commutes(logical_x[i], logical_z[j]) != (i != j)) {
        throw StructuralError(fmt::format("logical X{} and Z{} have the wrong commutation", i, j));
      }
    }
  }
  if (n <= kMaxDenseQubits) {
    const double tr = codespace_projector(*this).trace().real();
    if (std::abs(tr - std::ldexp(1.0, k)) > 1e-9) {
      throw StructuralError(fmt::format("generators of {} are dependent (trace {})", name, tr));
    }
  }
}

StabilizerCode builtin_code(std::string_view name) {
  StabilizerCode code;
  code.name = std::string(name);
  if (name == "repetition3") {
    code.n = 3;
    code.k = 1;
    code.stabilizers = parse_all({"ZZI", "IZZ"});
    code.logical_x = parse_all({"XXX"});
    code.logical_z = parse_all({"ZII"});
  } else if (name == "perfect5") {
    code.n = 5;
    code.k = 1;
    code.stabilizers = parse_all({"XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"});
    code.logical_x = parse_all({"XXXXX"});
    code.logical_z = parse_all({"ZZZZZ"});
  } else if (name == "detect422") {
    code.n = 4;
    code.k = 2;
    code.stabilizers = parse_all({"XXXX", "ZZZZ"});
    code.logical_x = parse_all({"XXII", "XIXI"});
    code.logical_z = parse_all({"IZIZ", "IIZZ"});
  } else {
    throw ConfigError(fmt::format("unknown code '{}'", name));
  }
  code.validate();
  return code;
}

std::vector<std::string> builtin_code_names() { return {"repetition3", "perfect5", "detect422"}; }

PauliString logical_pauli_product(const StabilizerCode& code, const std::vector<int>& indices) {
  if (static_cast<int>(indices.size()) != code.k) {
    throw StructuralError(fmt::format("logical word has {} digits, code has k = {}", indices.size(), code.k));
  }
  PauliString out = PauliString::identity(code.n);
  for (int i = 0; i < code.k; ++i) {
    switch (indices[i]) {
      case 0: break;
      case 1: out = pauli_product(out, code.logical_x[i]); break;
      case 2: {
        PauliString y = pauli_product(code.logical_x[i], code.logical_z[i]);
        out = pauli_product(out, y.with_phase(y.phase() + 1));
        break;
      }
      case 3: out = pauli_product(out, code.logical_z[i]); break;
      default: throw StructuralError(fmt::format("logical index {} outside 0..3", indices[i]));
    }
  }
  if (!out.hermitian()) throw StructuralError("logical product is not Hermitian");
  return out;
}

std::vector<int> parse_logical_word(std::string_view word, int k) {
  if (static_cast<int>(word.size()) != k) {
    throw ConfigError(fmt::format("logical word '{}' must have {} digits", word, k));
  }
  std::vector<int> out;
  for (char ch : word) {
    if (ch < '0' || ch > '3') {
      throw ConfigError(fmt::format("logical word '{}' has digit outside 0..3", word));
    }
    out.push_back(ch - '0');
  }
  return out;
}

std::string logical_word_string(const std::vector<int>& indices) {
  std::string s;
  for (int d : indices) s.push_back(static_cast<char>('0' + d));
  return s;
}

std::vector<std::vector<int>> all_logical_words(int k) {
  std::vector<std::vector<int>> out;
  const int total = 1 << (2 * k);
  for (int code = 0; code < total; ++code) {
    std::vector<int> w(k);
    int rest = code;
    for (int i = k - 1; i >= 0; --i) {
      w[i] = rest % 4;
      rest /= 4;
    }
    out.push_back(std::move(w));
  }
  return out;
}

ThermoSystem build_stabilizer_system(const StabilizerCode& code,
                                     const std::vector<ChargeSpec>& charges,
                                     const std::vector<double>& gammas) {
  if (!gammas.empty() && gammas.size() != code.stabilizers.size()) {
    throw ConfigError(fmt::format("{} weights given for {} generators", gammas.size(),
                                  code.stabilizers.size()));
  }
  // Positive weights keep the codespace as the ground space.
  for (double g : gammas) {
    if (!(g > 0.0) || !std::isfinite(g)) throw ConfigError(fmt::format("generator weight {} is not positive", g));
  }
  std::vector<std::pair<double, PauliString>> terms;
  for (std::size_t i = 0; i < code.stabilizers.size(); ++i) {
    terms.push_back({-(gammas.empty() ? 1.0 : gammas[i]), code.stabilizers[i]});
  }
  ThermoSystem sys;
  sys.hamiltonian = Observable(code.n, terms);
  for (const ChargeSpec& c : charges) {
    if (static_cast<int>(c.word.size()) != code.k) {
      throw ConfigError(fmt::format("charge word has {} digits, code has k = {}", c.word.size(), code.k));
    }
    for (int d : c.word) {
      if (d < 0 || d > 3) throw ConfigError("charge word digit outside 0..3");
    }
    if (std::all_of(c.word.begin(), c.word.end(), [](int d) { return d == 0; })) {
      throw ConfigError("the identity word cannot be a charge");
    }
    sys.charges.push_back(Observable::from_pauli(logical_pauli_product(code, c.word)));
    sys.targets.push_back(c.target);
  }
  sys.label = code.name;
  sys.conserved = true;
  sys.validate();
  return sys;
}

Matrix codespace_projector(const StabilizerCode& code) {
  const std::int64_t dim = std::int64_t{1} << code.n;
  Matrix p = Matrix::Identity(dim, dim);
  const Matrix id = Matrix::Identity(dim, dim);
  for (const PauliString& s : code.stabilizers) p = p * ((id + s.dense()) * 0.5);
  return p;
}

double commutator_norm(const Matrix& a, const Matrix& b) {
  return (a * b - b * a).cwiseAbs().maxCoeff();
}

}  // namespace qthermo
