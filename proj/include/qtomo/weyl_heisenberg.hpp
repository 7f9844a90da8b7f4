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

// The Weyl-Heisenberg group WH(2), its projection onto the translation group
// of phase space, and its unitary representation by displacement operators
// D(mu, nu) = exp(i (mu Q + nu P)) in the truncated Fock basis.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "qtomo/error.hpp"
#include "qtomo/fock.hpp"

namespace qtomo {

/// Point (mu, nu) of the translation group R^2.
struct PhasePoint {
  double mu = 0.0;
  double nu = 0.0;

  friend PhasePoint operator+(PhasePoint a, PhasePoint b) { return {a.mu + b.mu, a.nu + b.nu}; }
  friend PhasePoint operator-(PhasePoint a, PhasePoint b) { return {a.mu - b.mu, a.nu - b.nu}; }
  friend PhasePoint operator-(PhasePoint a) { return {-a.mu, -a.nu}; }
  friend PhasePoint operator*(double s, PhasePoint a) { return {s * a.mu, s * a.nu}; }
  friend bool operator==(const PhasePoint&, const PhasePoint&) = default;

  double norm() const { return std::hypot(mu, nu); }
  bool is_origin() const { return mu == 0.0 && nu == 0.0; }
};

/// Element (mu, nu, t) of WH(2); t is the central coordinate.
struct GroupElement {
  double mu = 0.0;
  double nu = 0.0;
  double t = 0.0;

  constexpr PhasePoint projection() const { return {mu, nu}; }
  friend bool operator==(const GroupElement&, const GroupElement&) = default;
};

/// Symplectic form omega(v, w) = mu nu' - nu mu'.
constexpr double cocycle(PhasePoint v, PhasePoint w) { return v.mu * w.nu - v.nu * w.mu; }

/// Group law (v, t) o (w, t') = (v + w, t + t' + omega(v, w)/2).
constexpr GroupElement compose(const GroupElement& g, const GroupElement& h) {
  return {g.mu + h.mu, g.nu + h.nu,
          g.t + h.t + 0.5 * cocycle(g.projection(), h.projection())};
}

constexpr GroupElement inverse(const GroupElement& g) { return {-g.mu, -g.nu, -g.t}; }

constexpr GroupElement identity_element() { return {}; }

/// (mu, nu) = (e^lambda cos theta, e^-lambda sin theta). Not onto R^2: |mu nu| <= 1/2.
inline PhasePoint symplectic_params(double lambda, double theta) {
  return {std::exp(lambda) * std::cos(theta), std::exp(-lambda) * std::sin(theta)};
}

/// Sign s in D(v) D(w) = exp(-(i/2) s omega(v, w)) D(v + w) for this
/// library's operator convention ([Q, P] = i, D = exp(i(mu Q + nu P))).
inline constexpr int kProjectiveSign = +1;

/// Coherent amplitude alpha with D(mu, nu) = exp(alpha a^dag - conj(alpha) a).
inline cplx coherent_amplitude(PhasePoint v) {
  return cplx(-v.nu, v.mu) / std::numbers::sqrt2;
}

struct DisplacementMatrix {
  std::size_t dim = 0;
  CMatrix matrix;
};

/// Minimal width of the untrusted band along the truncation edge.
inline std::size_t truncation_buffer(std::size_t dim) { return dim / 4; }

/// max |(B B^dag) - I| where B holds the first `block` rows of d across all of
/// its columns: the weight those rows leak past the cutoff.
inline double unitarity_defect(const CMatrix& d, Eigen::Index block) {
  const CMatrix b = d.topRows(block);
  const CMatrix prod = b * b.adjoint();
  if (!prod.allFinite()) return std::numeric_limits<double>::infinity();
  return (prod - CMatrix::Identity(block, block)).cwiseAbs().maxCoeff();
}

/// Matrix elements <m|D(v)|n> for m < rows, n < cols of the untruncated
/// operator, from the associated-Laguerre closed form
///   <m|D|n> = sqrt(n!/m!) alpha^(m-n) e^(-|alpha|^2/2) L_n^(m-n)(|alpha|^2),  m >= n,
///   <m|D|n> = sqrt(m!/n!) (-conj alpha)^(n-m) e^(-|alpha|^2/2) L_m^(n-m)(|alpha|^2), m < n.
/// Each diagonal m - n = const is swept with the Laguerre recurrence in the
/// lower index, so the cost is O(rows * cols).
inline CMatrix displacement_elements(PhasePoint v, Eigen::Index rows, Eigen::Index cols) {
  CMatrix out = CMatrix::Zero(rows, cols);
  const cplx alpha = coherent_amplitude(v);
  const double x = std::norm(alpha);
  const cplx beta_upper = -std::conj(alpha);

  auto sweep = [&](Eigen::Index k, cplx c0, bool lower) {
    // Diagonal entries (j + k, j) when lower, (j, j + k) otherwise.
    const Eigen::Index len =
        lower ? std::min(rows - k, cols) : std::min(rows, cols - k);
    const double dk = static_cast<double>(k);
    double l_prev = 0.0, l_cur = 1.0;
    cplx c = c0;
    for (Eigen::Index j = 0; j < len; ++j) {
      const double dj = static_cast<double>(j);
      if (j == 1) {
        l_prev = 1.0;
        l_cur = 1.0 + dk - x;
      } else if (j > 1) {
        const double next = ((2.0 * dj - 1.0 + dk - x) * l_cur - (dj - 1.0 + dk) * l_prev) / dj;
        l_prev = l_cur;
        l_cur = next;
      }
      if (j > 0) c *= std::sqrt(dj / (dj + dk));
      if (lower)
        out(j + k, j) = c * l_cur;
      else
        out(j, j + k) = c * l_cur;
    }
  };

  cplx c_lower = std::exp(-0.5 * x);
  cplx c_upper = c_lower;
  const Eigen::Index kmax = std::max(rows, cols);
  for (Eigen::Index k = 0; k < kmax; ++k) {
    if (k > 0) {
      const double inv = 1.0 / std::sqrt(static_cast<double>(k));
      c_lower *= alpha * inv;
      c_upper *= beta_upper * inv;
    }
    if (k < rows) sweep(k, c_lower, true);
    if (k > 0 && k < cols) sweep(k, c_upper, false);
  }
  return out;
}

/// Fast path: dim x dim block of the exact displacement operator.
inline DisplacementMatrix displacement_closed_form(PhasePoint v, std::size_t dim) {
  if (dim < 2) throw InvalidInput("displacement_closed_form: dim must be >= 2");
  const auto n = static_cast<Eigen::Index>(dim);
  return {dim, displacement_elements(v, n, n)};
}

/// Reference path: exp(i(mu Q + nu P)) of the truncated canonical operators
/// (Pade scaling and squaring). Trustworthy only on the buffered block.
inline DisplacementMatrix displacement_expm(PhasePoint v, std::size_t dim) {
  if (dim < 2) throw InvalidInput("displacement_expm: dim must be >= 2");
  const auto ops = canonical_operators(dim);
  const CMatrix gen = cplx(0.0, 1.0) * (v.mu * ops.q + v.nu * ops.p);
  return {dim, gen.exp()};
}

/// Size of the buffered block of the dim x dim truncation of D(v): the
/// largest B <= dim - truncation_buffer(dim) whose rows keep all but `tol` of
/// their norm inside the cutoff. Displacement mixes Fock levels over a band
/// that widens with |v|, so the buffer grows beyond dim/4 for large |v|.
inline std::size_t buffered_block(PhasePoint v, std::size_t dim, double tol = 1e-8) {
  if (dim < 2) throw InvalidInput("buffered_block: dim must be >= 2");
  const auto n = static_cast<Eigen::Index>(dim);
  const CMatrix d = displacement_elements(v, n, n);
  const Eigen::VectorXd norms = d.rowwise().squaredNorm();
  const auto limit = static_cast<Eigen::Index>(dim - truncation_buffer(dim));
  Eigen::Index b = 0;
  while (b < limit && std::isfinite(norms(b)) && std::abs(norms(b) - 1.0) <= tol) ++b;
  return static_cast<std::size_t>(b);
}

struct CharacteristicOptions {
  /// 0: use exact closed-form elements on the state's block.
  /// Otherwise: truncate D at this dimension and require the state's block
  /// to be unitary to `unitarity_tol` before trusting it.
  std::size_t displacement_dim = 0;
  double unitarity_tol = 1e-8;
};

/// psi_rho(v) = Tr[rho D(v)].
inline cplx characteristic_fn(const DensityState& rho, PhasePoint v,
                              const CharacteristicOptions& opts = {}) {
  const auto d = static_cast<Eigen::Index>(rho.dim());
  CMatrix block;
  if (opts.displacement_dim == 0) {
    block = displacement_elements(v, d, d);
    if (!block.allFinite())
      throw TruncationError("characteristic_fn: displacement elements overflow at |v| = " +
                            std::to_string(v.norm()));
  } else {
    if (opts.displacement_dim < rho.dim() + 1)
      throw TruncationError("characteristic_fn: displacement dim must exceed the state dim");
    const auto full = static_cast<Eigen::Index>(opts.displacement_dim);
    const CMatrix rows = displacement_elements(v, d, full);
    // Rows of the state's block must carry all their weight inside the cutoff.
    const double defect = rows.allFinite()
                              ? (rows.rowwise().squaredNorm().array() - 1.0).abs().maxCoeff()
                              : std::numeric_limits<double>::infinity();
    if (!(defect <= opts.unitarity_tol))
      throw TruncationError("characteristic_fn: truncation at dim " +
                            std::to_string(opts.displacement_dim) + " too small for |v| = " +
                            std::to_string(v.norm()) + " (unitarity defect " +
                            std::to_string(defect) + ")");
    block = rows.leftCols(d);
  }
  // Tr[rho D] = sum_mn rho_mn D_nm
  return (rho.matrix().transpose().cwiseProduct(block)).sum();
}

/// Lift to WH(2) with gamma = 1: phi(mu, nu, t) = e^{it} psi(mu, nu).
template <typename Psi>
cplx lift(const Psi& psi, const GroupElement& g) {
  return std::polar(1.0, g.t) * cplx(psi(g.projection()));
}

}  // namespace qtomo
