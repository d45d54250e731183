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

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "qthermo/error.hpp"
#include "qthermo/experiment.hpp"
#include "qthermo/gibbs.hpp"
#include "qthermo/random.hpp"
#include "qthermo/shots.hpp"

namespace qthermo {
namespace {

// Running maximum of an error against a fixed tolerance.
class Check {
 public:
  Check(std::string name, double tolerance) : name_(std::move(name)), tolerance_(tolerance) {}

  void record(double error) {
    if (std::isnan(error)) error = std::numeric_limits<double>::infinity();
    max_ = std::max(max_, error);
    ++count_;
  }

  VerifyCheck finish() const {
    VerifyCheck c;
    c.name = name_;
    c.max_error = max_;
    c.tolerance = tolerance_;
    c.passed = count_ > 0 && max_ <= tolerance_;
    c.detail = fmt::format("{} cases", count_);
    return c;
  }

 private:
  std::string name_;
  double tolerance_;
  double max_ = 0.0;
  int count_ = 0;
};

VerifyReport formulas_suite(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Check td("trace_distance_closed_form", 1e-10);
  Check fid("fidelity_closed_form", 1e-10);
  Check rel("relative_entropy_closed_form", 1e-10);
  Check renyi("renyi_equal_relative_entropy", 1e-10);
  Check identities("td_one_minus_f_and_d_minus_log_f", 1e-12);
  Check bounds("gap_bounds_hold", 1e-12);
  Check duality("free_energy_duality", 1e-10);
  for (int trial = 0; trial < 50; ++trial) {
    const Observable h = random_hamiltonian(3, rng);
    for (double beta : {0.1, 1.0, 10.0}) {
      const ClosenessMetrics m = closeness_metrics(h.dense(), beta);
      td.record(std::abs(m.trace_distance - m.trace_distance_closed));
      fid.record(std::abs(m.fidelity - m.fidelity_closed));
      rel.record(std::abs(m.relative_entropy - m.relative_entropy_closed));
      for (const auto& r : m.renyi) {
        renyi.record(std::max({std::abs(r.petz - m.relative_entropy_closed),
                               std::abs(r.sandwiched - m.relative_entropy_closed),
                               std::abs(r.geometric - m.relative_entropy_closed)}));
      }
      identities.record(std::max(std::abs(m.trace_distance_closed - (1.0 - m.fidelity_closed)),
                                 std::abs(m.relative_entropy_closed + std::log(m.fidelity_closed))));
      bounds.record(std::max({0.0, m.trace_distance_closed - m.trace_distance_bound,
                              m.fidelity_bound - m.fidelity_closed}));
    }
  }
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 20; ++trial) {
    const ThermoSystem sys = random_system(3, 2, rng);
    const Vector q = sys.target_vector();
    const Vector mu = Vector::NullaryExpr(2, [&] { return gauss(rng); });
    const double temp = 0.5;
    const ThermalState st = thermal_state(sys, mu, temp);
    const Vector qe = charge_expectations(sys, st);
    const double primal = primal_free_energy(sys, st.rho, temp) + mu.dot(q - qe);
    duality.record(std::abs(objective_f(sys, q, mu, temp) - primal));
  }
  VerifyReport rep;
  rep.suite = "formulas";
  for (const Check* c : {&td, &fid, &rel, &renyi, &identities, &bounds, &duality}) rep.checks.push_back(c->finish());
  return rep;
}

VerifyReport gradients_suite(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Check grad("gradient_vs_finite_difference", 1e-6);
  Check hess("hessian_vs_finite_difference", 1e-5);
  Check nsd("hessian_negative_semidefinite", 1e-10);
  Check smooth("hessian_norm_below_L", 1e-12);
  Check fourier("hessian_fourier_form", 1e-8);
  std::uniform_real_distribution<double> temp_draw(0.1, 2.0);
  for (int trial = 0; trial < 25; ++trial) {
    const int c = 3;
    const ThermoSystem sys = random_system(3, c, rng);
    const Vector q = sys.target_vector();
    const double temp = temp_draw(rng);
    const Vector mu = Vector::NullaryExpr(c, [&] { return gauss(rng); });
    const Vector g = gradient(sys, q, mu, temp);
    const RealMatrix hm = hessian_exact(sys, mu, temp);
    for (int i = 0; i < c; ++i) {
      const double h1 = 1e-5;
      Vector e = Vector::Zero(c);
      e(i) = h1;
      const double fd = (objective_f(sys, q, mu + e, temp) - objective_f(sys, q, mu - e, temp)) / (2.0 * h1);
      grad.record(std::abs(fd - g(i)));
      const double h2 = 1e-4;
      e(i) = h2;
      const Vector col = (gradient(sys, q, mu + e, temp) - gradient(sys, q, mu - e, temp)) / (2.0 * h2);
      hess.record((col - hm.col(i)).cwiseAbs().maxCoeff());
    }
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(hm);
    nsd.record(std::max(0.0, es.eigenvalues().maxCoeff()));
    smooth.record(std::max(0.0, es.eigenvalues().cwiseAbs().maxCoeff() - smoothness_L(sys, temp)));
    const ThermalState st = thermal_state(sys, mu, temp);
    fourier.record((hessian_fourier_quadrature(sys, st, PhiMode::kGeneric) - hm).cwiseAbs().maxCoeff());
  }
  VerifyReport rep;
  rep.suite = "gradients";
  for (const Check* ck : {&grad, &hess, &nsd, &smooth, &fourier}) rep.checks.push_back(ck->finish());
  return rep;
}

VerifyReport codes_suite() {
  VerifyReport rep;
  rep.suite = "codes";
  for (const auto& name : builtin_code_names()) {
    const StabilizerCode code = builtin_code(name);
    VerifyCheck structural;
    structural.name = name + "_invariants";
    structural.tolerance = 0.0;
    try {
      code.validate();
      structural.passed = true;
    } catch (const Error& e) {
      structural.passed = false;
      structural.max_error = 1.0;
      structural.detail = e.what();
    }
    rep.checks.push_back(structural);

    // Logical products commute with every stabilizer and square to identity.
    int violations = 0;
    for (const auto& w : all_logical_words(code.k)) {
      const PauliString p = logical_pauli_product(code, w);
      if (!p.hermitian()) ++violations;
      for (const auto& s : code.stabilizers) {
        if (!commutes(p, s)) ++violations;
      }
      if (!pauli_product(p, p).is_identity() || pauli_product(p, p).phase() != 0) ++violations;
    }
    VerifyCheck logical;
    logical.name = name + "_logical_words";
    logical.tolerance = 0.0;
    logical.max_error = violations;
    logical.passed = violations == 0;
    rep.checks.push_back(logical);

    Check proj(name + "_projector", 1e-12);
    const Matrix p = codespace_projector(code);
    proj.record((p * p - p).cwiseAbs().maxCoeff());
    proj.record(std::abs(p.trace().real() - std::ldexp(1.0, code.k)));
    rep.checks.push_back(proj.finish());
  }
  Check conserved("heisenberg_charges_conserved", 1e-12);
  for (Geometry geo : {Geometry::kLine, Geometry::kGrid}) {
    for (bool nnn : {false, true}) {
      HeisenbergSpec spec;
      spec.geometry = geo;
      spec.n = 4;
      spec.rows = 2;
      spec.cols = 2;
      spec.nnn = nnn;
      const ThermoSystem sys = build_heisenberg(spec, {0.0, 0.0, 0.0});
      for (const auto& qc : sys.charges) conserved.record(commutator_norm(sys.hamiltonian.dense(), qc.dense()));
    }
  }
  rep.checks.push_back(conserved.finish());
  return rep;
}

}  // namespace

bool VerifyReport::passed() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.passed; });
}

VerifyReport run_verify_suite(const std::string& suite, std::uint64_t seed) {
  if (suite == "formulas") return formulas_suite(seed);
  if (suite == "gradients") return gradients_suite(seed);
  if (suite == "codes") return codes_suite();
  throw ConfigError(fmt::format("unknown verify suite '{}'", suite));
}

}  // namespace qthermo
