// Copyright 2026 The qtomo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Truncated Fock-basis numerics: density states, canonical operators and
// harmonic-oscillator eigenfunctions.
//
// Convention used everywhere in qtomo: hbar = 1, Q = (a + a^dag)/sqrt(2),
// P = (a - a^dag)/(i sqrt(2)), so [Q, P] = i and the vacuum has <Q^2> = 1/2.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qtomo/error.hpp"

namespace qtomo {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

namespace linalg {

/// max |M_ij - conj(M_ji)|
inline double hermiticity_defect(const CMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

/// Eigenvalues (ascending) of the Hermitian part of m.
inline Eigen::VectorXd hermitian_eigenvalues(const CMatrix& m) {
  const CMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

/// Zero-pads m into the top-left corner of a dim x dim matrix.
inline CMatrix embed(const CMatrix& m, Eigen::Index dim) {
  CMatrix out = CMatrix::Zero(dim, dim);
  out.topLeftCorner(m.rows(), m.cols()) = m;
  return out;
}

}  // namespace linalg

/// Tolerances of the DensityState invariants.
struct StateTolerances {
  double hermiticity = 1e-12;
  double trace = 1e-10;
  double min_eigenvalue = 1e-10;
};

/// Density matrix in a truncated Fock basis. Always satisfies the state
/// invariants (Hermitian, unit trace, positive semidefinite).
class DensityState {
 public:
  /// Lists every violated invariant; empty when m is a valid state.
  static std::vector<std::string> violations(const CMatrix& m,
                                             const StateTolerances& tol = {}) {
    std::vector<std::string> out;
    if (m.rows() == 0 || m.rows() != m.cols()) {
      out.emplace_back("matrix must be square and non-empty");
      return out;
    }
    if (!m.allFinite()) {
      out.emplace_back("matrix has non-finite entries");
      return out;
    }
    const double herm = linalg::hermiticity_defect(m);
    if (herm > tol.hermiticity)
      out.push_back("not Hermitian (defect " + std::to_string(herm) + ")");
    const cplx tr = m.trace();
    if (std::abs(tr - 1.0) > tol.trace)
      out.push_back("trace is not one (trace " + std::to_string(tr.real()) + ")");
    const double lmin = linalg::hermitian_eigenvalues(m)(0);
    if (lmin < -tol.min_eigenvalue)
      out.push_back("not positive semidefinite (min eigenvalue " +
                    std::to_string(lmin) + ")");
    return out;
  }

  /// Validates m; throws InvalidState naming the failed invariants.
  static DensityState from_matrix(CMatrix m, const StateTolerances& tol = {}) {
    const auto bad = violations(m, tol);
    if (!bad.empty()) {
      std::string msg = "invalid density state:";
      for (const auto& b : bad) msg += " " + b + ";";
      throw InvalidState(msg);
    }
    return DensityState(std::move(m));
  }

  std::size_t dim() const { return static_cast<std::size_t>(rho_.rows()); }
  const CMatrix& matrix() const { return rho_; }
  cplx operator()(Eigen::Index m, Eigen::Index n) const { return rho_(m, n); }

  /// Tr rho^2
  double purity() const { return (rho_ * rho_).trace().real(); }

  /// The same state in a larger truncation (zero padding).
  DensityState embedded(std::size_t new_dim) const {
    if (new_dim < dim()) throw InvalidInput("cannot embed into a smaller dimension");
    return DensityState(linalg::embed(rho_, static_cast<Eigen::Index>(new_dim)));
  }

 private:
  explicit DensityState(CMatrix m) : rho_(std::move(m)) {}
  CMatrix rho_;
};

/// |psi><psi| / <psi|psi>
inline DensityState make_pure(const CVector& coefficients) {
  const double norm = coefficients.norm();
  if (coefficients.size() == 0 || !(norm > 0.0) || !std::isfinite(norm))
    throw InvalidInput("make_pure: coefficient vector must be finite and non-zero");
  const CVector psi = coefficients / norm;
  CMatrix rho = psi * psi.adjoint();
  // Exact Hermiticity regardless of rounding in the outer product.
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return DensityState::from_matrix(std::move(rho));
}

/// Fock state |n> truncated at dim.
inline DensityState make_fock(std::size_t n, std::size_t dim) {
  if (n >= dim) throw InvalidInput("make_fock: level must be below dim");
  CVector c = CVector::Zero(static_cast<Eigen::Index>(dim));
  c(static_cast<Eigen::Index>(n)) = 1.0;
  return make_pure(c);
}

/// Smallest cutoff whose discarded thermal weight (nbar/(nbar+1))^dim is below 1e-12.
inline std::size_t thermal_min_dim(double nbar) {
  if (nbar < 0.0 || !std::isfinite(nbar)) throw InvalidInput("thermal: nbar must be >= 0");
  if (nbar == 0.0) return 1;
  const double r = nbar / (nbar + 1.0);
  return static_cast<std::size_t>(std::ceil(std::log(1e-12) / std::log(r))) + 1;
}

/// Thermal state with mean occupation nbar, renormalized after truncation.
inline DensityState make_thermal(double nbar, std::size_t dim) {
  if (nbar < 0.0 || !std::isfinite(nbar))
    throw InvalidInput("make_thermal: nbar must be a nonnegative number");
  if (dim == 0 || dim < thermal_min_dim(nbar))
    throw InvalidInput("make_thermal: dim " + std::to_string(dim) +
                       " leaves truncated weight above 1e-12 (need >= " +
                       std::to_string(thermal_min_dim(nbar)) + ")");
  const double r = nbar / (nbar + 1.0);
  CMatrix rho = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  double w = 1.0, total = 0.0;
  for (std::size_t n = 0; n < dim; ++n) {
    rho(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) = w;
    total += w;
    w *= r;
  }
  rho /= total;
  return DensityState::from_matrix(std::move(rho));
}

/// Position and momentum in the truncated Fock basis.
struct CanonicalOperators {
  std::size_t dim = 0;
  CMatrix q;
  CMatrix p;
};

inline CanonicalOperators canonical_operators(std::size_t dim) {
  if (dim < 2) throw InvalidInput("canonical_operators: dim must be >= 2");
  const auto n = static_cast<Eigen::Index>(dim);
  CanonicalOperators ops{dim, CMatrix::Zero(n, n), CMatrix::Zero(n, n)};
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    // <k|a|k+1> = sqrt(k+1)
    const double amp = std::sqrt(static_cast<double>(k + 1)) * inv_sqrt2;
    ops.q(k, k + 1) = amp;
    ops.q(k + 1, k) = amp;
    ops.p(k, k + 1) = cplx(0.0, -amp);
    ops.p(k + 1, k) = cplx(0.0, amp);
  }
  return ops;
}

/// Oscillator eigenfunctions u_0(x) .. u_{count-1}(x).
///
/// Normalized three-term recurrence
///   u_{n+1} = sqrt(2/(n+1)) x u_n - sqrt(n/(n+1)) u_{n-1},
/// carried without the Gaussian factor and rescaled whenever it grows large;
/// exp(-x^2/2) and the accumulated scale are applied per term at the end, so
/// nothing overflows or underflows prematurely.
inline std::vector<double> hermite_functions(std::size_t count, double x) {
  std::vector<double> u(count, 0.0);
  if (count == 0) return u;
  constexpr double kBig = 0x1p+400;
  const double pi_quarter = std::pow(std::numbers::pi, -0.25);
  std::vector<double> raw(count);
  std::vector<int> scale(count, 0);  // raw[n] * 2^(400*scale[n]) is the polynomial part
  int s = 0;
  double prev = 0.0, cur = pi_quarter;
  raw[0] = cur;
  for (std::size_t n = 0; n + 1 < count; ++n) {
    const double dn = static_cast<double>(n);
    double next = std::sqrt(2.0 / (dn + 1.0)) * x * cur - std::sqrt(dn / (dn + 1.0)) * prev;
    prev = cur;
    cur = next;
    if (std::abs(cur) > kBig) {
      cur /= kBig;
      prev /= kBig;
      ++s;
    }
    raw[n + 1] = cur;
    scale[n + 1] = s;
  }
  const double half_x2 = 0.5 * x * x;
  const double log_big = 400.0 * std::numbers::ln2;
  for (std::size_t n = 0; n < count; ++n) {
    if (raw[n] == 0.0) continue;
    u[n] = raw[n] * std::exp(scale[n] * log_big - half_x2);
  }
  return u;
}

/// Normalized oscillator eigenfunction u_n(x), with u_n(0) > 0 for even n.
inline double hermite_function(int n, double x) {
  if (n < 0) throw InvalidInput("hermite_function: n must be >= 0");
  return hermite_functions(static_cast<std::size_t>(n) + 1, x).back();
}

}  // namespace qtomo
