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

#include "qthermo/oracle.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "qthermo/error.hpp"

namespace qthermo {
namespace {

Matrix dual_matrix(const ThermoSystem& system, const Vector& mu) {
  Matrix a = system.hamiltonian.dense();
  for (int i = 0; i < system.num_charges(); ++i) a -= mu(i) * system.charges[i].dense();
  return a;
}

Eigen::SelfAdjointEigenSolver<Matrix> eig(const Matrix& a, int options = Eigen::ComputeEigenvectors) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, options);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");
  return es;
}

double min_eigenvalue(const Matrix& a) { return eig(a, Eigen::EigenvaluesOnly).eigenvalues()(0); }

// Supergradient of g at mu: q_i - <psi|Q_i|psi> for the first ground vector.
Vector supergradient(const ThermoSystem& system, const Vector& q, const Eigen::VectorXcd& psi) {
  Vector g(system.num_charges());
  for (int i = 0; i < system.num_charges(); ++i) {
    g(i) = q(i) - psi.dot(system.charges[i].dense() * psi).real();
  }
  return g;
}

struct BarrierResult {
  Vector mu;
  double gap_bound = std::numeric_limits<double>::infinity();
  bool ok = false;
  int newton_steps = 0;
};

// Maximizes mu.q + s + tau ln det(H - mu.Q - s I) for a decreasing sequence of tau.
BarrierResult barrier_polish(const ThermoSystem& system, const Vector& q, const Vector& mu0, double tolerance) {
  const int c = system.num_charges();
  const Eigen::Index d = system.hamiltonian.dense().rows();
  const int nv = c + 1;
  std::vector<const Matrix*> gens;
  for (const Observable& ch : system.charges) gens.push_back(&ch.dense());
  const Matrix id = Matrix::Identity(d, d);
  gens.push_back(&id);

  Vector x(nv);
  x.head(c) = mu0;
  {
    const Matrix a = dual_matrix(system, mu0);
    const double lmin = min_eigenvalue(a);
    x(c) = lmin - std::max(1.0, std::abs(lmin));
  }
  auto objective = [&](const Vector& xv, double tau, bool& feasible) {
    Matrix m = dual_matrix(system, xv.head(c)) - xv(c) * id;
    auto es = eig(m, Eigen::EigenvaluesOnly);
    feasible = es.eigenvalues()(0) > 0.0;
    if (!feasible) return -std::numeric_limits<double>::infinity();
    return xv.head(c).dot(q) + xv(c) + tau * es.eigenvalues().array().log().sum();
  };

  BarrierResult res;
  double tau = 1.0;
  const double final_tau = tolerance / static_cast<double>(d);
  for (int outer = 0; outer < 60; ++outer) {
    bool centered = false;
    for (int step = 0; step < 100; ++step) {
      Matrix m = dual_matrix(system, x.head(c)) - x(c) * id;
      auto es = eig(m);
      const Vector& lam = es.eigenvalues();
      if (lam(0) <= 0.0) return res;
      const Matrix& v = es.eigenvectors();
      std::vector<Matrix> gt(nv);
      for (int k = 0; k < nv; ++k) gt[k] = v.adjoint() * (*gens[k]) * v;
      const Vector inv = lam.cwiseInverse();
      Vector grad(nv);
      for (int k = 0; k < nv; ++k) grad(k) = (k < c ? q(k) : 1.0) - tau * gt[k].diagonal().real().dot(inv);
      // Hess_kl = -tau sum_ab G_k,ab G_l,ba / (lam_a lam_b)
      RealMatrix outer_inv = inv * inv.transpose();
      RealMatrix hess(nv, nv);
      for (int k = 0; k < nv; ++k) {
        for (int l = k; l < nv; ++l) {
          double s = (outer_inv.array() * (gt[k].array() * gt[l].transpose().array()).real()).sum();
          hess(k, l) = hess(l, k) = -tau * s;
        }
      }
      RealMatrix neg = -hess;
      Eigen::LDLT<RealMatrix> ldlt(neg);
      Vector dx = ldlt.solve(grad);
      if (ldlt.info() != Eigen::Success || !dx.allFinite()) {
        neg += 1e-12 * neg.diagonal().cwiseAbs().maxCoeff() * RealMatrix::Identity(nv, nv);
        dx = neg.ldlt().solve(grad);
        if (!dx.allFinite()) return res;
      }
      const double decrement = grad.dot(dx);
      ++res.newton_steps;
      if (decrement <= 1e-12 * tau) {
        centered = true;
        break;
      }
      bool feasible = false;
      const double f0 = objective(x, tau, feasible);
      double t = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls) {
        Vector xn = x + t * dx;
        const double f1 = objective(xn, tau, feasible);
        if (feasible && f1 >= f0 + 0.25 * t * decrement) {
          x = xn;
          moved = true;
          break;
        }
        t *= 0.5;
      }
      if (!moved) {
        centered = decrement <= 1e-8 * tau;
        break;
      }
    }
    if (!centered) return res;
    if (tau <= final_tau) break;
    tau = std::max(final_tau, tau * 0.1);
  }
  res.mu = x.head(c);
  res.ok = true;
  // On the central path the duality gap is tau * d.
  res.gap_bound = tau * static_cast<double>(d);
  return res;
}

}  // namespace

double dual_value(const ThermoSystem& system, const Vector& q, const Vector& mu) {
  return mu.dot(q) + min_eigenvalue(dual_matrix(system, mu));
}

DualSolution dual_eigenvalue_solve(const ThermoSystem& system, const Vector& q, const DualSolveOptions& options) {
  const int c = system.num_charges();
  if (q.size() != c) throw ContractError("target length differs from charge count");
  DualSolution sol;
  Vector mu = Vector::Zero(c);
  Vector best_mu = mu;
  double best = -std::numeric_limits<double>::infinity();

  if (c > 0) {
    Vector avg = Vector::Zero(c);
    int since_improvement = 0;
    int m = 1;
    for (; m <= options.iterations; ++m) {
      auto es = eig(dual_matrix(system, mu));
      const double val = mu.dot(q) + es.eigenvalues()(0);
      if (val > best) {
        best = val;
        best_mu = mu;
        since_improvement = 0;
      } else {
        ++since_improvement;
      }
      avg += (mu - avg) / static_cast<double>(m);
      if (m % 10 == 0) {
        const double av = dual_value(system, q, avg);
        if (av > best) {
          best = av;
          best_mu = avg;
          since_improvement = 0;
        }
      }
      if (since_improvement >= options.patience) break;
      const Vector g = supergradient(system, q, es.eigenvectors().col(0));
      mu += options.step0 / std::sqrt(static_cast<double>(m)) * g;
    }
    sol.iterations = m;
    sol.low_confidence = since_improvement >= options.patience;
  }
  sol.mu_star = best_mu;
  sol.gap_bound = std::numeric_limits<double>::infinity();

  if (c > 0 && options.barrier_polish) {
    BarrierResult br = barrier_polish(system, q, best_mu, options.tolerance);
    if (br.ok) {
      const double polished = dual_value(system, q, br.mu);
      if (polished >= dual_value(system, q, best_mu)) sol.mu_star = br.mu;
      sol.gap_bound = br.gap_bound;
      sol.low_confidence = false;
    } else {
      sol.low_confidence = true;
    }
  }
  if (c == 0) sol.gap_bound = 0.0;

  auto es = eig(dual_matrix(system, sol.mu_star));
  const Vector& lam = es.eigenvalues();
  sol.value = sol.mu_star.dot(q) + lam(0);
  const double tol = options.degeneracy_tol * std::max(1.0, std::abs(lam(0)));
  int mult = 0;
  while (mult < lam.size() && lam(mult) - lam(0) <= tol) ++mult;
  sol.ground_multiplicity = mult;
  const Matrix g = es.eigenvectors().leftCols(mult);
  sol.ground_projector = g * g.adjoint();
  return sol;
}

Matrix matrix_power(const Matrix& a, double power, double zero_tol) {
  auto es = eig(a);
  Vector lam = es.eigenvalues();
  for (Eigen::Index k = 0; k < lam.size(); ++k) {
    if (lam(k) <= zero_tol) {
      if (power <= 0.0) throw DomainError("negative power of a singular matrix");
      lam(k) = 0.0;
    } else {
      lam(k) = std::pow(lam(k), power);
    }
  }
  const Matrix& v = es.eigenvectors();
  return v * lam.cast<cplx>().asDiagonal() * v.adjoint();
}

Matrix matrix_sqrt(const Matrix& a) { return matrix_power(a, 0.5); }

Matrix matrix_log(const Matrix& a) {
  auto es = eig(a);
  Vector lam = es.eigenvalues();
  if (lam(0) <= 0.0) throw DomainError("logarithm of a matrix that is not positive definite");
  lam = lam.array().log();
  const Matrix& v = es.eigenvectors();
  return v * lam.cast<cplx>().asDiagonal() * v.adjoint();
}

double trace_norm(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues().sum();
}

double fidelity(const Matrix& a, const Matrix& b) {
  const double s = trace_norm(matrix_sqrt(a) * matrix_sqrt(b));
  return s * s;
}

double relative_entropy(const Matrix& a, const Matrix& b) {
  auto ea = eig(a, Eigen::EigenvaluesOnly);
  double alna = 0.0;
  for (double p : ea.eigenvalues()) {
    if (p > 1e-14) alna += p * std::log(p);
  }
  return alna - (a * matrix_log(b)).trace().real();
}

ClosenessMetrics closeness_metrics(const Matrix& h, double beta, const std::vector<double>& alphas,
                                   double degeneracy_tol) {
  if (beta < 0.0) throw ContractError("beta must be non-negative");
  ClosenessMetrics out;
  out.alphas = alphas;
  auto es = eig(h);
  const Vector& lam = es.eigenvalues();
  const Eigen::Index d = lam.size();
  const double spread = lam(d - 1) - lam(0);
  const double tol = degeneracy_tol * std::max(1.0, std::abs(spread));
  int dg = 0;
  while (dg < d && lam(dg) - lam(0) <= tol) ++dg;
  out.ground_dimension = dg;
  if (dg == d) {
    out.degenerate_spectrum = true;
    out.fidelity = 0.0;
    out.renyi.assign(alphas.size(), RenyiValues{});
    return out;
  }
  out.gap = lam(dg) - lam(0);

  // Closed forms.
  double s = 0.0;
  for (Eigen::Index k = dg; k < d; ++k) s += std::exp(-beta * (lam(k) - lam(0)));
  const double dgd = static_cast<double>(dg);
  out.trace_distance_closed = 1.0 / (1.0 + dgd / s);
  out.fidelity_closed = 1.0 / (1.0 + s / dgd);
  out.relative_entropy_closed = std::log1p(s / dgd);
  const double rest = static_cast<double>(d - dg);
  out.trace_distance_bound = 1.0 / (1.0 + std::exp(beta * out.gap) * dgd / rest);
  out.fidelity_bound = 1.0 / (1.0 + std::exp(-beta * out.gap) * rest / dgd);

  // Direct matrix computations.
  const Matrix shifted = -beta * (h - lam(0) * Matrix::Identity(d, d));
  Matrix rho = shifted.exp();
  rho /= rho.trace().real();
  const Matrix g = es.eigenvectors().leftCols(dg);
  const Matrix omega = g * g.adjoint() / dgd;

  auto diff = eig(rho - omega, Eigen::EigenvaluesOnly);
  out.trace_distance = 0.5 * diff.eigenvalues().cwiseAbs().sum();
  out.fidelity = fidelity(omega, rho);
  // Work in the eigenbasis of rho: forming rho^{1-alpha} in the computational
  // basis costs all precision once its condition number passes 1/eps.
  auto er = eig(rho);
  const Matrix& v = er.eigenvectors();
  const Vector lam_rho = er.eigenvalues().cwiseMax(std::numeric_limits<double>::min());
  // omega = sum_j m_j y_j y_j^+ with y_j its eigenvectors in this basis; the
  // outer-product form keeps tiny overlaps accurate relative to themselves.
  auto eo = eig(omega);
  const Matrix y = v.adjoint() * eo.eigenvectors();
  const Vector m = eo.eigenvalues().unaryExpr([](double x) { return x <= 1e-14 ? 0.0 : x; });
  const Matrix w = y * m.cast<cplx>().asDiagonal() * y.adjoint();
  // D(omega || rho) = Tr omega ln omega - sum_i <i|omega|i> ln lambda_i; the
  // eigenbasis form survives eigenvalues of rho that round to zero or below.
  double rel = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    if (m(j) > 0.0) rel += m(j) * std::log(m(j));
  }
  for (Eigen::Index i = 0; i < d; ++i) rel -= w(i, i).real() * std::log(lam_rho(i));
  out.relative_entropy = rel;
  for (double alpha : alphas) {
    RenyiValues r;
    const double k = 1.0 / (alpha - 1.0);
    double petz = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) {
        if (m(j) > 0.0) petz += std::pow(lam_rho(i), 1.0 - alpha) * std::pow(m(j), alpha) * std::norm(y(i, j));
      }
    }
    r.petz = k * std::log(petz);
    const Vector side = lam_rho.array().pow((1.0 - alpha) / (2.0 * alpha));
    const Matrix sw = side.cast<cplx>().asDiagonal() * w * side.cast<cplx>().asDiagonal();
    r.sandwiched = k * std::log(matrix_power(sw, alpha).trace().real());
    const Vector inv_half = lam_rho.array().rsqrt();
    const Matrix gw = inv_half.cast<cplx>().asDiagonal() * w * inv_half.cast<cplx>().asDiagonal();
    r.geometric = k * std::log((lam_rho.cast<cplx>().asDiagonal() * matrix_power(gw, alpha)).trace().real());
    out.renyi.push_back(r);
  }
  return out;
}

double beta_for_trace_distance(double eps, double gap, int dimension, int ground_dimension) {
  if (!(eps > 0.0 && eps < 1.0) || !(gap > 0.0)) throw DomainError("need 0 < eps < 1 and a positive gap");
  const double ratio = static_cast<double>(dimension - ground_dimension) / ground_dimension;
  return std::log((1.0 - eps) / eps * ratio) / gap;
}

double beta_for_relative_entropy(double eps, double gap, int dimension, int ground_dimension) {
  if (!(eps > 0.0) || !(gap > 0.0)) throw DomainError("need eps > 0 and a positive gap");
  const double ratio = static_cast<double>(dimension - ground_dimension) / ground_dimension;
  return std::log(ratio / std::expm1(eps)) / gap;
}

double complementary_slackness_residual(const ThermoSystem& system, const DualSolution& dual,
                                        const Matrix& rho) {
  const Matrix a = dual_matrix(system, dual.mu_star);
  return std::abs(expectation(a, rho) - min_eigenvalue(a));
}

}  // namespace qthermo
