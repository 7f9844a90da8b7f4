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

// Inverse quantum Radon transform, purity functionals and fidelity.
//
// rho = (1/2pi) int psi_f(mu, nu) D(-mu, -nu) dmu dnu, with psi_f the Fourier
// slice of the tomogram at unit frequency. The (mu, nu) integral runs over a
// cell-centred n x n grid on [-R, R]^2 masked to the disk of radius R.

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qtomo/error.hpp"
#include "qtomo/fock.hpp"
#include "qtomo/positivity.hpp"
#include "qtomo/tomogram.hpp"
#include "qtomo/weyl_heisenberg.hpp"

namespace qtomo {

struct DiskQuadrature {
  double radius = 8.0;
  std::size_t nodes = 128;  // per axis

  void validate() const {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidInput("disk radius must be positive");
    if (nodes < 2) throw InvalidInput("need at least 2 nodes per axis");
  }
  double step() const { return 2.0 * radius / static_cast<double>(nodes); }

  /// Nodes inside the disk, row-major in (mu, nu). Every node carries weight step()^2.
  std::vector<PhasePoint> points() const {
    validate();
    const double h = step();
    std::vector<PhasePoint> out;
    for (std::size_t i = 0; i < nodes; ++i) {
      const double mu = -radius + (static_cast<double>(i) + 0.5) * h;
      for (std::size_t j = 0; j < nodes; ++j) {
        const double nu = -radius + (static_cast<double>(j) + 0.5) * h;
        if (mu * mu + nu * nu <= radius * radius) out.push_back({mu, nu});
      }
    }
    return out;
  }
};

/// Raw output of the inversion. Not a state until validate_as_state accepts it.
struct ReconstructionResult {
  CMatrix rho;
  double trace = 0.0;
  double min_eigenvalue = 0.0;
  double hermiticity_defect = 0.0;
  DiskQuadrature quadrature;
  std::size_t nodes_in_disk = 0;
  std::string source;
  /// Largest |psi_f| sampled on the disk edge; the inversion assumes it is negligible.
  double edge_magnitude = 0.0;
  std::vector<std::string> diagnostics;

  static ReconstructionResult from_matrix(CMatrix m, DiskQuadrature quad = {}, std::size_t in_disk = 0,
                                          std::string source = {}) {
    if (m.rows() == 0 || m.rows() != m.cols()) throw InvalidInput("reconstruction: matrix must be square");
    ReconstructionResult r;
    r.trace = m.trace().real();
    r.hermiticity_defect = linalg::hermiticity_defect(m);
    r.min_eigenvalue = linalg::hermitian_eigenvalues(m)(0);
    r.rho = std::move(m);
    r.quadrature = quad;
    r.nodes_in_disk = in_disk;
    r.source = std::move(source);
    return r;
  }
};

/// Smallest disk radius (on a 0.25 grid) beyond which every Fock-block
/// element |<m|D(v)|n>|, m, n < dim, stays below `tail`. A state supported on
/// the first dim levels then has |psi(v)| < tail outside the disk.
inline double required_disk_radius(std::size_t dim, double tail = 1e-8) {
  if (dim == 0) throw InvalidInput("required_disk_radius: dim must be >= 1");
  const auto n = static_cast<Eigen::Index>(dim);
  auto peak = [&](double s) { return displacement_elements({s, 0.0}, n, n).cwiseAbs().maxCoeff(); };
  for (double R = 0.25;; R += 0.25) {
    bool ok = true;
    for (double s = R; s <= R + 6.0 && ok; s += 0.125) ok = peak(s) < tail;
    if (ok) return R;
  }
}

/// Reconstructs the top-left dim x dim block of the density operator.
inline ReconstructionResult inverse_radon(const TomogramSource& src, std::size_t dim,
                                          double R = 8.0, std::size_t nodes = 128) {
  if (dim < 2) throw InvalidInput("inverse_radon: dim must be >= 2");
  const DiskQuadrature quad{R, nodes};
  const auto pts = quad.points();
  const double h = quad.step();
  const TomographicCharacteristic psi(src);
  const auto n = static_cast<Eigen::Index>(dim);
  CMatrix acc = CMatrix::Zero(n, n);
  for (const auto& v : pts) {
    const cplx c = psi(v);
    const CMatrix d = displacement_elements(-v, n, n);
    if (!d.allFinite()) throw TruncationError("inverse_radon: displacement elements overflow");
    acc += c * d;
  }
  acc *= h * h / (2.0 * std::numbers::pi);
  auto res = ReconstructionResult::from_matrix(std::move(acc), quad, pts.size(), src.description());
  for (int k = 0; k < 64; ++k) {
    const double a = 2.0 * std::numbers::pi * k / 64.0;
    res.edge_magnitude = std::max(res.edge_magnitude, std::abs(psi({R * std::cos(a), R * std::sin(a)})));
  }
  if (res.edge_magnitude > 1e-8)
    res.diagnostics.push_back("|psi_f| reaches " + std::to_string(res.edge_magnitude) +
                              " on the disk edge; the disk radius is too small for this source");
  return res;
}

inline double min_eig_of_reconstruction(const ReconstructionResult& r) { return r.min_eigenvalue; }

struct StateValidation {
  bool accepted = false;
  std::optional<DensityState> state;
  double hermiticity_defect = 0.0;
  double trace_defect = 0.0;
  double min_eigenvalue = 0.0;
  std::vector<std::string> reasons;  // empty when accepted
};

/// Accepts iff Hermitian, unit trace and PSD, each within tol. An accepted
/// matrix is symmetrized, its negative eigenvalues clipped, and renormalized.
inline StateValidation validate_as_state(const ReconstructionResult& res, double tol = 1e-3) {
  StateValidation out;
  out.hermiticity_defect = res.hermiticity_defect;
  out.trace_defect = std::abs(res.trace - 1.0);
  out.min_eigenvalue = res.min_eigenvalue;
  if (!res.rho.allFinite()) out.reasons.push_back("matrix has non-finite entries");
  if (out.hermiticity_defect > tol)
    out.reasons.push_back("hermiticity defect " + std::to_string(out.hermiticity_defect) + " > tol");
  if (out.trace_defect > tol)
    out.reasons.push_back("trace " + std::to_string(res.trace) + " differs from 1 by more than tol");
  if (out.min_eigenvalue < -tol)
    out.reasons.push_back("min eigenvalue " + std::to_string(out.min_eigenvalue) + " < -tol");
  if (!out.reasons.empty()) return out;

  const CMatrix h = 0.5 * (res.rho + res.rho.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  const Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
  CMatrix p = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
  p /= p.trace().real();
  p = 0.5 * (p + p.adjoint());
  out.state = DensityState::from_matrix(std::move(p));
  out.accepted = true;
  return out;
}

/// Tr rho^2 = (1/2pi) int |psi_f(v)|^2 dv.
inline double purity_from_characteristic(const TomogramSource& src, double R = 8.0,
                                         std::size_t nodes = 128) {
  const DiskQuadrature quad{R, nodes};
  const auto pts = quad.points();
  const double h = quad.step();
  const TomographicCharacteristic psi(src);
  double acc = 0.0;
  for (const auto& v : pts) acc += std::norm(psi(v));
  const double p = acc * h * h / (2.0 * std::numbers::pi);
  if (!std::isfinite(p)) throw QuadratureError("purity: non-finite result");
  return p;
}

enum class PurityMode {
  factorized,  // X and Y integrals split into psi_f(v) psi_f(-v)
  direct,      // unfactorized double sum over (X, Y) at every v
};

/// Tr rho^2 = (1/2pi) int W(X, v) W(Y, -v) e^{i(X+Y)} dX dY dv.
///
/// Factorized: int W(Y, -v) e^{iY} dY = conj(psi_f(v)) because W(Y, -v) =
/// W(-Y, v), so the integrand is |psi_f(v)|^2 and the sum is the one in
/// purity_from_characteristic. Direct: both slices sampled independently and
/// the double sum formed term by term.
inline double purity_from_tomogram(const TomogramSource& src, double R = 8.0, std::size_t nodes = 128,
                                   PurityMode mode = PurityMode::factorized) {
  if (mode == PurityMode::factorized) return purity_from_characteristic(src, R, nodes);

  const DiskQuadrature quad{R, nodes};
  const auto pts = quad.points();
  const double h = quad.step();
  double acc = 0.0;
  std::vector<cplx> ex, ey;
  for (const auto& v : pts) {
    const RaySamples a = src.sample_ray(v);
    const RaySamples b = src.sample_ray(-v);
    ex.resize(a.x.size());
    ey.resize(b.x.size());
    for (std::size_t i = 0; i < a.x.size(); ++i) ex[i] = a.weight[i] * a.value[i] * std::polar(1.0, a.x[i]);
    for (std::size_t j = 0; j < b.x.size(); ++j) ey[j] = b.weight[j] * b.value[j] * std::polar(1.0, b.x[j]);
    cplx s = 0.0;
    for (std::size_t i = 0; i < ex.size(); ++i)
      for (std::size_t j = 0; j < ey.size(); ++j) s += ex[i] * ey[j];
    acc += s.real();
  }
  const double p = acc * h * h / (2.0 * std::numbers::pi);
  if (!std::isfinite(p)) throw QuadratureError("purity: non-finite result");
  return p;
}

/// Uhlmann fidelity Tr sqrt(sqrt(a) b sqrt(a)) in [0, 1]. The smaller state
/// is zero-padded to the larger dimension.
inline double state_fidelity(const DensityState& a, const DensityState& b) {
  const auto n = static_cast<Eigen::Index>(std::max(a.dim(), b.dim()));
  const CMatrix ma = linalg::embed(a.matrix(), n);
  const CMatrix mb = linalg::embed(b.matrix(), n);
  Eigen::SelfAdjointEigenSolver<CMatrix> ea(ma);
  const Eigen::VectorXd ra = ea.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const CMatrix sa = ea.eigenvectors() * ra.asDiagonal() * ea.eigenvectors().adjoint();
  CMatrix inner = sa * mb * sa;
  inner = 0.5 * (inner + inner.adjoint());
  const Eigen::VectorXd lam = Eigen::SelfAdjointEigenSolver<CMatrix>(inner, Eigen::EigenvaluesOnly).eigenvalues();
  double f = 0.0;
  for (Eigen::Index i = 0; i < lam.size(); ++i) f += std::sqrt(std::max(lam(i), 0.0));
  return std::clamp(f, 0.0, 1.0);
}

}  // namespace qtomo
