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

// Positive-definiteness tests for tomogram-like functions.
//
// A tomogram-like f is a quantum tomogram iff psi_f(mu, nu) = int f(X, mu, nu)
// e^{iX} dX lifts to a positive-type function phi(mu, nu, t) = e^{it} psi_f on
// WH(2), equivalently iff psi_f is of omega-positive type on the translation
// group. Positivity is probed on finite tuples of points; a negative
// eigenvalue falsifies, while passing a finite budget proves nothing.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qtomo/error.hpp"
#include "qtomo/fock.hpp"
#include "qtomo/tomogram.hpp"
#include "qtomo/weyl_heisenberg.hpp"

namespace qtomo {

enum class SliceMode {
  characteristic,  // int W e^{iX} dX
  normalization,   // int W dX, the zero-frequency slice
};

/// psi_f(v) = int W(X, v) e^{iX} dX on the source's own quadrature nodes.
inline cplx fourier_slice(const TomogramSource& src, PhasePoint v,
                          SliceMode mode = SliceMode::characteristic) {
  const RaySamples smp = src.sample_ray(v, mode == SliceMode::characteristic ? 1.0 : 0.0);
  cplx acc = 0.0;
  for (std::size_t j = 0; j < smp.x.size(); ++j) {
    const double wv = smp.weight[j] * smp.value[j];
    acc += mode == SliceMode::characteristic ? wv * std::polar(1.0, smp.x[j]) : cplx(wv);
  }
  if (!std::isfinite(acc.real()) || !std::isfinite(acc.imag()))
    throw QuadratureError("fourier_slice: non-finite result");
  return acc;
}

/// Same, by the trapezoid rule on an explicit X grid.
inline cplx fourier_slice(const TomogramSource& src, PhasePoint v, const GridSpec& quad,
                          SliceMode mode = SliceMode::characteristic) {
  quad.validate();
  const double h = quad.step();
  cplx acc = 0.0;
  for (std::size_t i = 0; i < quad.n_x; ++i) {
    const double X = quad.x(i);
    const double w = (i == 0 || i + 1 == quad.n_x) ? 0.5 * h : h;
    const double wv = w * src.evaluate(X, v);
    acc += mode == SliceMode::characteristic ? wv * std::polar(1.0, X) : cplx(wv);
  }
  if (!std::isfinite(acc.real()) || !std::isfinite(acc.imag()))
    throw QuadratureError("fourier_slice: non-finite result");
  return acc;
}

/// psi_f as a function on the whole translation group. The origin is not a
/// ray; there psi_f is the limit along a ray, the normalization integral.
class TomographicCharacteristic {
 public:
  explicit TomographicCharacteristic(TomogramSource src) : src_(std::move(src)) {}

  cplx operator()(PhasePoint v) const {
    if (v.is_origin()) {
      const PhasePoint ray = src_.kind() == SourceKind::tabulated ? src_.rays()[0].ray
                                                                   : PhasePoint{1.0, 0.0};
      return fourier_slice(src_, ray, SliceMode::normalization);
    }
    return fourier_slice(src_, v);
  }

  const TomogramSource& source() const { return src_; }

 private:
  TomogramSource src_;
};

/// psi_rho(v) = Tr[rho D(v)] as a callable.
struct StateCharacteristic {
  DensityState rho;
  cplx operator()(PhasePoint v) const { return characteristic_fn(rho, v); }
};

enum class GramKind {
  wh_group,       // M_jk = phi(g_j g_k^-1) on WH(2)
  omega_twisted,  // M~_jk = psi(v_k - v_j) e^{(i/2) omega(v_k, v_j)}
  classical,      // M_jk = psi(v_j - v_k), no cocycle
};

inline const char* to_string(GramKind k) {
  switch (k) {
    case GramKind::wh_group: return "wh-group";
    case GramKind::omega_twisted: return "omega-twisted";
    case GramKind::classical: return "classical";
  }
  return "unknown";
}

/// Hermitian matrix built from a candidate group function on a point tuple.
/// Phase-point kinds store their points with t = 0.
struct GramMatrix {
  GramKind kind = GramKind::omega_twisted;
  std::vector<GroupElement> points;
  CMatrix matrix;
};

inline constexpr std::size_t kMaxTupleSize = 64;

namespace detail {

inline void check_tuple_size(std::size_t n) {
  if (n == 0 || n > kMaxTupleSize)
    throw InvalidInput("Gram tuple size must be in [1, 64], got " + std::to_string(n));
}

inline std::vector<GroupElement> as_elements(std::span<const PhasePoint> pts) {
  std::vector<GroupElement> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back({p.mu, p.nu, 0.0});
  return out;
}

}  // namespace detail

/// M_jk = phi(g_j o g_k^-1) with phi = lift(psi), using the full group law.
template <typename Psi>
GramMatrix build_M(const Psi& psi, std::span<const GroupElement> points) {
  detail::check_tuple_size(points.size());
  const auto n = static_cast<Eigen::Index>(points.size());
  GramMatrix g{GramKind::wh_group, {points.begin(), points.end()}, CMatrix(n, n)};
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k)
      g.matrix(j, k) = lift(psi, compose(points[static_cast<std::size_t>(j)],
                                         inverse(points[static_cast<std::size_t>(k)])));
  return g;
}

/// M~_jk = psi((v_j)^-1 o v_k) e^{(i/2) omega(v_k, v_j)}, with
/// (v_j)^-1 o v_k = v_k - v_j on the quotient group.
template <typename Psi>
GramMatrix build_M_omega(const Psi& psi, std::span<const PhasePoint> points) {
  detail::check_tuple_size(points.size());
  const auto n = static_cast<Eigen::Index>(points.size());
  GramMatrix g{GramKind::omega_twisted, detail::as_elements(points), CMatrix(n, n)};
  for (Eigen::Index j = 0; j < n; ++j) {
    const PhasePoint vj = points[static_cast<std::size_t>(j)];
    for (Eigen::Index k = 0; k < n; ++k) {
      const PhasePoint vk = points[static_cast<std::size_t>(k)];
      g.matrix(j, k) = cplx(psi(vk - vj)) * std::polar(1.0, 0.5 * cocycle(vk, vj));
    }
  }
  return g;
}

/// M_jk = psi(v_j - v_k): plain positive-definiteness on R^2 (Bochner).
template <typename Psi>
GramMatrix build_M_classical(const Psi& psi, std::span<const PhasePoint> points) {
  detail::check_tuple_size(points.size());
  const auto n = static_cast<Eigen::Index>(points.size());
  GramMatrix g{GramKind::classical, detail::as_elements(points), CMatrix(n, n)};
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k)
      g.matrix(j, k) = cplx(psi(points[static_cast<std::size_t>(j)] - points[static_cast<std::size_t>(k)]));
  return g;
}

/// Smallest eigenvalue of a Hermitian matrix. The Hermiticity tolerance is
/// relative to max(1, max |M_jk|).
inline double min_eigenvalue(const CMatrix& m, double herm_tol = 1e-10) {
  if (m.rows() == 0 || m.rows() != m.cols()) throw InvalidMatrix("min_eigenvalue: matrix must be square");
  if (!m.allFinite()) throw InvalidMatrix("min_eigenvalue: non-finite entries");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double defect = linalg::hermiticity_defect(m);
  if (defect > herm_tol * scale)
    throw InvalidMatrix("min_eigenvalue: not Hermitian (defect " + std::to_string(defect) + ")");
  return linalg::hermitian_eigenvalues(m)(0);
}

inline double min_eigenvalue(const GramMatrix& g, double herm_tol = 1e-10) {
  return min_eigenvalue(g.matrix, herm_tol);
}

/// Finite GNS factorization: vectors w_j with <w_j, w_k> = M_jk, one
/// coordinate per numerically nonzero eigenvalue.
inline std::vector<CVector> gns_embed(const CMatrix& m, double neg_tol = 1e-10) {
  if (m.rows() == 0 || m.rows() != m.cols()) throw InvalidMatrix("gns_embed: matrix must be square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (linalg::hermiticity_defect(m) > 1e-10 * scale)
    throw InvalidMatrix("gns_embed: matrix is not Hermitian");
  const CMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  const Eigen::VectorXd& lambda = es.eigenvalues();
  if (lambda(0) < -neg_tol * scale)
    throw NotPositiveDefinite("gns_embed: eigenvalue " + std::to_string(lambda(0)) +
                              " is decisively negative");
  const double cutoff = std::max(lambda(lambda.size() - 1), 0.0) * 1e-15 * static_cast<double>(m.rows());
  std::vector<Eigen::Index> kept;
  for (Eigen::Index r = 0; r < lambda.size(); ++r)
    if (lambda(r) > cutoff) kept.push_back(r);
  // <w_j, w_k> = sum_r conj(w_j)_r (w_k)_r = sum_r V_jr lambda_r conj(V_kr)
  std::vector<CVector> out(static_cast<std::size_t>(m.rows()),
                           CVector::Zero(static_cast<Eigen::Index>(kept.size())));
  for (std::size_t c = 0; c < kept.size(); ++c) {
    const double root = std::sqrt(lambda(kept[c]));
    for (Eigen::Index j = 0; j < m.rows(); ++j)
      out[static_cast<std::size_t>(j)](static_cast<Eigen::Index>(c)) =
          root * std::conj(es.eigenvectors()(j, kept[c]));
  }
  return out;
}

inline std::vector<CVector> gns_embed(const GramMatrix& g, double neg_tol = 1e-10) {
  return gns_embed(g.matrix, neg_tol);
}

// ---------------------------------------------------------------------------
// Randomized search

/// Independent generator for one trial, derived from (seed, trial).
inline std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  return std::mt19937_64(seq);
}

/// Points with Gaussian coordinates of scale `radius`. When `line` is given
/// the points lie on the line through the origin and `line`.
inline std::vector<PhasePoint> sample_phase_points(std::mt19937_64& rng, std::size_t n,
                                                   double radius,
                                                   std::optional<PhasePoint> line = std::nullopt) {
  std::normal_distribution<double> gauss(0.0, radius);
  std::vector<PhasePoint> pts(n);
  for (auto& p : pts) {
    if (line) {
      const double c = gauss(rng) / line->norm();
      p = c * *line;
    } else {
      const double mu = gauss(rng);
      const double nu = gauss(rng);
      p = {mu, nu};
    }
  }
  return pts;
}

/// Gaussian (mu, nu) of scale `radius`, central t uniform on [0, 2 pi).
inline std::vector<GroupElement> sample_group_elements(std::mt19937_64& rng, std::size_t n,
                                                       double radius) {
  std::normal_distribution<double> gauss(0.0, radius);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::vector<GroupElement> pts(n);
  for (auto& g : pts) {
    const double mu = gauss(rng);
    const double nu = gauss(rng);
    const double t = angle(rng);
    g = {mu, nu, t};
  }
  return pts;
}

struct SearchOptions {
  std::size_t trials = 200;
  std::size_t tuple_size = 16;
  std::uint64_t seed = 42;
  double radius = 2.0;
  /// Restrict phase points to lines through these directions (trial t uses
  /// lines[t % size]); empty means the whole plane.
  std::vector<PhasePoint> lines;
};

struct SearchResult {
  GramKind kind = GramKind::omega_twisted;
  std::size_t trials = 0;
  std::size_t tuple_size = 0;
  double min_eigenvalue = std::numeric_limits<double>::infinity();
  std::size_t witness_trial = 0;
  std::vector<GroupElement> witness;
};

/// Builds `trials` Gram matrices of the requested kind on random tuples and
/// keeps the one with the smallest eigenvalue. Trials are independent and
/// folded in trial order, so the result depends only on the options.
template <typename Psi>
SearchResult gram_search(const Psi& psi, GramKind kind, const SearchOptions& opt) {
  if (opt.trials == 0) throw InvalidInput("gram_search: trials must be >= 1");
  detail::check_tuple_size(opt.tuple_size);
  SearchResult res;
  res.kind = kind;
  res.trials = opt.trials;
  res.tuple_size = opt.tuple_size;
  for (std::size_t t = 0; t < opt.trials; ++t) {
    auto rng = trial_rng(opt.seed, t);
    GramMatrix g;
    if (kind == GramKind::wh_group) {
      const auto pts = sample_group_elements(rng, opt.tuple_size, opt.radius);
      g = build_M(psi, pts);
    } else {
      std::optional<PhasePoint> line;
      if (!opt.lines.empty()) line = opt.lines[t % opt.lines.size()];
      const auto pts = sample_phase_points(rng, opt.tuple_size, opt.radius, line);
      g = kind == GramKind::omega_twisted ? build_M_omega(psi, pts) : build_M_classical(psi, pts);
    }
    const double lmin = min_eigenvalue(g);
    if (lmin < res.min_eigenvalue) {
      res.min_eigenvalue = lmin;
      res.witness_trial = t;
      res.witness = std::move(g.points);
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Certification

enum class Verdict { pass, fail, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

struct CertifyOptions {
  std::size_t trials = 200;
  std::size_t tuple_size = 16;
  std::uint64_t seed = 42;
  double radius = 2.0;
  /// Failure threshold is -fail_tol * tuple_size.
  double fail_tol = 1e-6;
  double normalization_tol = 1e-6;
  double nonnegativity_tol = 1e-8;
  double homogeneity_tol = 1e-6;
  std::size_t homogeneity_samples = 32;
};

struct PropertyChecks {
  struct Normalization {
    std::vector<PhasePoint> rays;
    std::vector<double> integrals;
    double max_defect = 0.0;
    bool passed = true;
  } normalization;
  struct Nonnegativity {
    double min_value = 0.0;
    double argmin_x = 0.0;
    PhasePoint argmin_ray;
    bool passed = true;
  } nonnegativity;
  struct Homogeneity {
    std::size_t samples = 0;
    double max_deviation = 0.0;
    bool passed = true;
  } homogeneity;

  bool all_passed() const { return normalization.passed && nonnegativity.passed && homogeneity.passed; }
};

struct CertificationReport {
  Verdict verdict = Verdict::inconclusive;
  std::string source;
  CertifyOptions options;
  GramKind formulation = GramKind::omega_twisted;
  double fail_threshold = 0.0;
  double min_eigenvalue_overall = std::numeric_limits<double>::infinity();
  std::size_t witness_trial = 0;
  std::vector<PhasePoint> witness;
  bool gram_violation = false;
  PropertyChecks property_checks;
  std::vector<std::string> diagnostics;
};

namespace detail {

inline std::vector<PhasePoint> property_rays(const TomogramSource& src) {
  if (src.kind() == SourceKind::tabulated) {
    std::vector<PhasePoint> out;
    for (const auto& r : src.rays()) out.push_back(r.ray);
    return out;
  }
  return {{1.0, 0.0}, {0.0, 1.0}, {0.6, -0.8}, {2.0, 3.0}};
}

inline PropertyChecks run_property_checks(const TomogramSource& src, const CertifyOptions& opt) {
  PropertyChecks pc;
  const auto rays = property_rays(src);
  pc.normalization.rays = rays;
  pc.nonnegativity.min_value = std::numeric_limits<double>::infinity();
  for (const auto& v : rays) {
    const double integral = src.kind() == SourceKind::tabulated
                                ? fourier_slice(src, v, SliceMode::normalization).real()
                                : check_normalization(src, v);
    pc.normalization.integrals.push_back(integral);
    pc.normalization.max_defect = std::max(pc.normalization.max_defect, std::abs(integral - 1.0));

    const auto nn = check_nonnegativity(src, v, src.default_grid(v, 481));
    if (nn.min_value < pc.nonnegativity.min_value)
      pc.nonnegativity = {nn.min_value, nn.argmin, v, true};
  }
  pc.normalization.passed = pc.normalization.max_defect <= opt.normalization_tol;
  pc.nonnegativity.passed = pc.nonnegativity.min_value >= -opt.nonnegativity_tol;

  // Separate stream from the Gram trials.
  auto rng = trial_rng(opt.seed ^ 0x5eedf00dULL, 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<HomogeneitySample> samples;
  for (std::size_t i = 0; i < opt.homogeneity_samples; ++i) {
    const PhasePoint v = rays[i % rays.size()];
    const double x = (2.0 * unit(rng) - 1.0) * 0.5 * src.support_half_width(v);
    double lambda = 0.25 * std::pow(16.0, unit(rng));
    if (unit(rng) < 0.5) lambda = -lambda;
    samples.push_back({x, v, lambda});
  }
  pc.homogeneity.samples = samples.size();
  pc.homogeneity.max_deviation = check_homogeneity(src, samples);
  pc.homogeneity.passed = pc.homogeneity.max_deviation <= opt.homogeneity_tol;
  return pc;
}

}  // namespace detail

/// Randomized test of the quantum-tomogram criterion in its omega-positive
/// form. `pass` means no violation was found within the budget.
inline CertificationReport certify(const TomogramSource& src, const CertifyOptions& opt = {}) {
  if (opt.trials == 0) throw InvalidInput("certify: trials must be >= 1");
  if (opt.tuple_size < 2 || opt.tuple_size > kMaxTupleSize)
    throw InvalidInput("certify: tuple size must be in [2, 64]");
  CertificationReport rep;
  rep.source = src.description();
  rep.options = opt;
  rep.fail_threshold = -opt.fail_tol * static_cast<double>(opt.tuple_size);
  bool numerical_trouble = false;

  try {
    rep.property_checks = detail::run_property_checks(src, opt);
  } catch (const QuadratureError& e) {
    numerical_trouble = true;
    rep.diagnostics.push_back(std::string("property checks: ") + e.what());
  } catch (const TruncationError& e) {
    numerical_trouble = true;
    rep.diagnostics.push_back(std::string("property checks: ") + e.what());
  }

  try {
    SearchOptions so{opt.trials, opt.tuple_size, opt.seed, opt.radius, {}};
    if (src.kind() == SourceKind::tabulated) {
      for (const auto& r : src.rays()) so.lines.push_back(r.ray);
      rep.diagnostics.push_back("tabulated source: tuples restricted to the supplied rays");
    }
    const auto res = gram_search(TomographicCharacteristic(src), GramKind::omega_twisted, so);
    rep.min_eigenvalue_overall = res.min_eigenvalue;
    rep.witness_trial = res.witness_trial;
    for (const auto& g : res.witness) rep.witness.push_back(g.projection());
    rep.gram_violation = res.min_eigenvalue < rep.fail_threshold;
  } catch (const QuadratureError& e) {
    numerical_trouble = true;
    rep.diagnostics.push_back(std::string("gram search: ") + e.what());
  } catch (const TruncationError& e) {
    numerical_trouble = true;
    rep.diagnostics.push_back(std::string("gram search: ") + e.what());
  } catch (const InvalidMatrix& e) {
    numerical_trouble = true;
    rep.diagnostics.push_back(std::string("gram search: ") + e.what());
  }

  const auto& pc = rep.property_checks;
  if (!pc.normalization.passed)
    rep.diagnostics.push_back("normalization fails: max |int W dX - 1| = " +
                              std::to_string(pc.normalization.max_defect));
  if (!pc.nonnegativity.passed)
    rep.diagnostics.push_back("nonnegativity fails: min W = " + std::to_string(pc.nonnegativity.min_value));
  if (!pc.homogeneity.passed)
    rep.diagnostics.push_back("homogeneity fails: max deviation = " +
                              std::to_string(pc.homogeneity.max_deviation));
  if (rep.gram_violation)
    rep.diagnostics.push_back("omega-twisted Gram matrix has eigenvalue " +
                              std::to_string(rep.min_eigenvalue_overall) + " in trial " +
                              std::to_string(rep.witness_trial));

  if (rep.gram_violation || !pc.all_passed())
    rep.verdict = Verdict::fail;
  else if (numerical_trouble)
    rep.verdict = Verdict::inconclusive;
  else
    rep.verdict = Verdict::pass;
  return rep;
}

}  // namespace qtomo
