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

// Symplectic tomograms W(X, mu, nu): the probability density of the
// quadrature mu Q + nu P at value X.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qtomo/error.hpp"
#include "qtomo/fock.hpp"
#include "qtomo/weyl_heisenberg.hpp"

namespace qtomo {

/// Uniform X grid plus the rays it is applied to.
struct GridSpec {
  double x_min = -6.0;
  double x_max = 6.0;
  std::size_t n_x = 241;
  std::vector<PhasePoint> rays;

  void validate() const {
    if (!(x_min < x_max) || !std::isfinite(x_min) || !std::isfinite(x_max))
      throw InvalidInput("grid: x_min must be below x_max");
    if (n_x < 2) throw InvalidInput("grid: n_x must be >= 2");
  }
  double step() const { return (x_max - x_min) / static_cast<double>(n_x - 1); }
  double x(std::size_t i) const { return x_min + step() * static_cast<double>(i); }
  std::vector<double> xs() const {
    std::vector<double> out(n_x);
    for (std::size_t i = 0; i < n_x; ++i) out[i] = x(i);
    return out;
  }
};

namespace detail {

inline double ray_scale(PhasePoint v) {
  const double s = v.norm();
  if (!(s > 0.0)) throw DegenerateRay();
  return s;
}

/// Gaussian-tail half width, in units of the ray scale, for a state with
/// Fock levels below dim.
inline double state_half_width(std::size_t dim) {
  return std::sqrt(2.0 * static_cast<double>(dim) + 1.0) + 6.0;
}

/// Reach of the characteristic function along a unit ray: |psi(k u)| is
/// negligible beyond this k.
inline double state_bandwidth(std::size_t dim) {
  return 2.0 * std::sqrt(2.0 * static_cast<double>(dim)) + 12.0;
}

/// Symmetric uniform grid on [-half_width, half_width] fine enough that the
/// trapezoid rule integrates f(x) e^{i freq x} exactly up to aliasing beyond
/// `bandwidth + freq`.
inline std::vector<double> reduced_nodes(double half_width, double bandwidth, double freq,
                                         double& step) {
  const double h_max = 2.0 * std::numbers::pi / (freq + bandwidth);
  const auto half = static_cast<std::size_t>(std::ceil(half_width / h_max));
  step = half_width / static_cast<double>(half);
  std::vector<double> x(2 * half + 1);
  for (std::size_t j = 0; j < x.size(); ++j)
    x[j] = (static_cast<double>(j) - static_cast<double>(half)) * step;
  return x;
}

}  // namespace detail

/// pr_theta(x) = sum_mn rho_mn e^{-i theta (m - n)} u_m(x) u_n(x), the
/// distribution of cos(theta) Q + sin(theta) P.
inline double quadrature_distribution(const DensityState& rho, double x, double theta) {
  const auto d = static_cast<Eigen::Index>(rho.dim());
  const auto u = hermite_functions(rho.dim(), x);
  CVector y(d);
  for (Eigen::Index n = 0; n < d; ++n) y(n) = std::polar(u[static_cast<std::size_t>(n)], theta * static_cast<double>(n));
  return (y.adjoint() * rho.matrix() * y)(0, 0).real();
}

/// W(X, v) = pr_theta(X / s) / s with s = |v|, theta = atan2(nu, mu).
inline double eval_from_state(const DensityState& rho, double X, PhasePoint v) {
  const double s = detail::ray_scale(v);
  return quadrature_distribution(rho, X / s, std::atan2(v.nu, v.mu)) / s;
}

/// Fourier route: W(X, v) = int e^{ikX} psi_rho(-k v) dk / 2pi, sampled on a
/// uniform k grid whose period in X covers the grid plus the tomogram's support.
inline std::vector<double> tomogram_via_fft(const DensityState& rho, const GridSpec& grid,
                                            PhasePoint v) {
  grid.validate();
  const double s = detail::ray_scale(v);
  const double x_reach = std::max(std::abs(grid.x_min), std::abs(grid.x_max));
  const double period = 2.0 * (x_reach + s * detail::state_half_width(rho.dim()));
  const double dk = 2.0 * std::numbers::pi / period;
  const double k_max = detail::state_bandwidth(rho.dim()) / s;
  const auto n_k = static_cast<std::size_t>(std::ceil(k_max / dk));

  std::vector<cplx> psi(n_k + 1);
  for (std::size_t j = 0; j <= n_k; ++j)
    psi[j] = characteristic_fn(rho, -(dk * static_cast<double>(j)) * v);

  std::vector<double> out(grid.n_x);
  for (std::size_t i = 0; i < grid.n_x; ++i) {
    const double X = grid.x(i);
    cplx acc = 0.0;
    for (std::size_t j = 1; j <= n_k; ++j)
      acc += psi[j] * std::polar(1.0, dk * static_cast<double>(j) * X);
    out[i] = dk / (2.0 * std::numbers::pi) * (psi[0].real() + 2.0 * acc.real());
  }
  return out;
}

/// Ground-state tomogram exp(-X^2/s^2) / sqrt(pi s^2).
inline double vacuum_tomogram(double X, PhasePoint v) {
  const double s2 = v.mu * v.mu + v.nu * v.nu;
  if (!(s2 > 0.0)) throw DegenerateRay();
  return std::exp(-X * X / s2) / std::sqrt(std::numbers::pi * s2);
}

/// f(X, mu, nu) = exp(-X^2 / (2 s^2)) (5 s^2 - X^2) / sqrt(2 s^6), s^2 = mu^2 + nu^2.
/// Homogeneous of degree -1 but neither normalized nor nonnegative.
inline double counterexample_f(double X, PhasePoint v) {
  const double s2 = v.mu * v.mu + v.nu * v.nu;
  if (!(s2 > 0.0)) throw DegenerateRay();
  return std::exp(-X * X / (2.0 * s2)) * (5.0 * s2 - X * X) / std::sqrt(2.0 * s2 * s2 * s2);
}

enum class SourceKind { state_derived, analytic_vacuum, analytic_counterexample, tabulated };

inline const char* to_string(SourceKind k) {
  switch (k) {
    case SourceKind::state_derived: return "state-derived";
    case SourceKind::analytic_vacuum: return "analytic-vacuum";
    case SourceKind::analytic_counterexample: return "analytic-counterexample";
    case SourceKind::tabulated: return "tabulated";
  }
  return "unknown";
}

/// Tomogram values along one ray u on a uniform X grid; values elsewhere on
/// the line through u follow from homogeneity, W(X, l u) = W(X / l, u) / |l|.
struct TabulatedRay {
  PhasePoint ray;
  double x_min = 0.0;
  double x_max = 0.0;
  std::vector<double> values;

  double step() const { return (x_max - x_min) / static_cast<double>(values.size() - 1); }
  /// Linear interpolation; zero outside the tabulated range.
  double at(double x) const {
    if (x < x_min || x > x_max) return 0.0;
    const double pos = (x - x_min) / step();
    const auto i = std::min(static_cast<std::size_t>(pos), values.size() - 2);
    const double f = pos - static_cast<double>(i);
    return (1.0 - f) * values[i] + f * values[i + 1];
  }
};

/// Quadrature nodes for int W(X, v) g(X) dX along one ray.
struct RaySamples {
  std::vector<double> x;
  std::vector<double> weight;
  std::vector<double> value;
};

/// An evaluatable tomogram-like function W(X, mu, nu). Immutable and cheap
/// to copy; copies share their precomputed data.
class TomogramSource {
  struct StateData {
    DensityState rho;
    // Reduced grid x_j and theta-independent pieces
    // g_k(x_j) = sum_n rho_{n+k,n} u_{n+k}(x_j) u_n(x_j), so that
    // pr_theta(x_j) = g_0 + 2 Re sum_{k>0} e^{-i k theta} g_k(x_j).
    std::vector<double> x;
    double step = 0.0;
    std::vector<std::vector<cplx>> g;
  };
  struct TableData {
    std::vector<TabulatedRay> rays;
  };
  struct Vacuum {};
  struct Counterexample {};
  using Payload = std::variant<std::shared_ptr<const StateData>, Vacuum, Counterexample,
                               std::shared_ptr<const TableData>>;

 public:
  /// Frequencies |s| up to this value reuse the cached reduced grid of a state source.
  static constexpr double kCachedFrequency = 24.0;

  static TomogramSource from_state(DensityState rho) {
    auto data = std::make_shared<StateData>(StateData{std::move(rho), {}, 0.0, {}});
    const std::size_t d = data->rho.dim();
    data->x = detail::reduced_nodes(detail::state_half_width(d), detail::state_bandwidth(d),
                                    kCachedFrequency, data->step);
    data->g.assign(d, std::vector<cplx>(data->x.size(), 0.0));
    const CMatrix& m = data->rho.matrix();
    for (std::size_t j = 0; j < data->x.size(); ++j) {
      const auto u = hermite_functions(d, data->x[j]);
      for (std::size_t k = 0; k < d; ++k) {
        cplx acc = 0.0;
        for (std::size_t n = 0; n + k < d; ++n)
          acc += m(static_cast<Eigen::Index>(n + k), static_cast<Eigen::Index>(n)) * (u[n + k] * u[n]);
        data->g[k][j] = acc;
      }
    }
    return TomogramSource(SourceKind::state_derived, std::move(data));
  }
  static TomogramSource vacuum() { return TomogramSource(SourceKind::analytic_vacuum, Vacuum{}); }
  static TomogramSource counterexample() {
    return TomogramSource(SourceKind::analytic_counterexample, Counterexample{});
  }
  static TomogramSource tabulated(std::vector<TabulatedRay> rays) {
    if (rays.empty()) throw InvalidInput("tabulated source needs at least one ray");
    for (const auto& r : rays) {
      if (r.ray.is_origin()) throw DegenerateRay();
      if (r.values.size() < 2 || !(r.x_min < r.x_max))
        throw InvalidInput("tabulated ray needs at least two samples on an increasing grid");
    }
    return TomogramSource(SourceKind::tabulated,
                          std::make_shared<const TableData>(TableData{std::move(rays)}));
  }

  SourceKind kind() const { return kind_; }

  std::string description() const {
    switch (kind_) {
      case SourceKind::state_derived: return "state-derived (dim " + std::to_string(state()->dim()) + ")";
      case SourceKind::tabulated: return "tabulated (" + std::to_string(rays().size()) + " rays)";
      default: return to_string(kind_);
    }
  }

  /// The underlying state for state-derived sources, else nullptr.
  const DensityState* state() const {
    if (auto p = std::get_if<0>(&payload_)) return &(*p)->rho;
    return nullptr;
  }

  std::span<const TabulatedRay> rays() const {
    if (auto p = std::get_if<3>(&payload_)) return (*p)->rays;
    return {};
  }

  /// W(X, v); throws DegenerateRay at v = (0, 0).
  double evaluate(double X, PhasePoint v) const {
    switch (kind_) {
      case SourceKind::state_derived: return eval_from_state(*state(), X, v);
      case SourceKind::analytic_vacuum: return vacuum_tomogram(X, v);
      case SourceKind::analytic_counterexample: return counterexample_f(X, v);
      case SourceKind::tabulated: {
        const auto [ray, lambda] = locate_ray(v);
        return ray->at(X / lambda) / std::abs(lambda);
      }
    }
    return 0.0;
  }

  /// Half width of the support along v, beyond which W is negligible.
  double support_half_width(PhasePoint v) const {
    const double s = detail::ray_scale(v);
    switch (kind_) {
      case SourceKind::state_derived: return s * detail::state_half_width(state()->dim());
      case SourceKind::analytic_vacuum: return s * 8.0;
      case SourceKind::analytic_counterexample: return s * 12.0;
      case SourceKind::tabulated: {
        const auto [ray, lambda] = locate_ray(v);
        return std::abs(lambda) * std::max(std::abs(ray->x_min), std::abs(ray->x_max));
      }
    }
    return 0.0;
  }

  /// Default uniform grid covering the support of W along v.
  GridSpec default_grid(PhasePoint v, std::size_t n_x = 241) const {
    const double w = support_half_width(v);
    return GridSpec{-w, w, n_x, {v}};
  }

  /// Nodes and weights for int W(X, v) g(X) dX, exact (up to tails and
  /// aliasing) for g(X) = e^{i f X} with |f| <= max_frequency.
  RaySamples sample_ray(PhasePoint v, double max_frequency = 1.0) const {
    const double s = detail::ray_scale(v);
    RaySamples out;
    if (kind_ == SourceKind::tabulated) {
      const auto [ray, lambda] = locate_ray(v);
      const std::size_t n = ray->values.size();
      const double h = ray->step();
      for (std::size_t j = 0; j < n; ++j) {
        const double y = ray->x_min + h * static_cast<double>(j);
        out.x.push_back(lambda * y);
        out.weight.push_back(std::abs(lambda) * h * ((j == 0 || j + 1 == n) ? 0.5 : 1.0));
        out.value.push_back(ray->values[j] / std::abs(lambda));
      }
      return out;
    }
    const double freq = s * max_frequency;
    if (kind_ == SourceKind::state_derived && freq <= kCachedFrequency) {
      const auto& data = *std::get<0>(payload_);
      const double theta = std::atan2(v.nu, v.mu);
      const std::size_t d = data.g.size();
      std::vector<cplx> phase(d);
      for (std::size_t k = 0; k < d; ++k) phase[k] = std::polar(1.0, -theta * static_cast<double>(k));
      const std::size_t n = data.x.size();
      out.x.resize(n);
      out.weight.assign(n, s * data.step);
      out.value.resize(n);
      for (std::size_t j = 0; j < n; ++j) {
        double pr = data.g[0][j].real();
        for (std::size_t k = 1; k < d; ++k) pr += 2.0 * (phase[k] * data.g[k][j]).real();
        out.x[j] = s * data.x[j];
        out.value[j] = pr / s;
      }
      return out;
    }
    double half_width = 0.0, bandwidth = 0.0;
    switch (kind_) {
      case SourceKind::state_derived:
        half_width = detail::state_half_width(state()->dim());
        bandwidth = detail::state_bandwidth(state()->dim());
        break;
      case SourceKind::analytic_vacuum: half_width = 8.0; bandwidth = 14.0; break;
      case SourceKind::analytic_counterexample: half_width = 12.0; bandwidth = 14.0; break;
      default: break;
    }
    double h = 0.0;
    const auto nodes = detail::reduced_nodes(half_width, bandwidth, freq, h);
    for (double xr : nodes) {
      out.x.push_back(s * xr);
      out.weight.push_back(s * h);
      out.value.push_back(evaluate(s * xr, v));
    }
    return out;
  }

 private:
  TomogramSource(SourceKind kind, Payload payload) : kind_(kind), payload_(std::move(payload)) {}

  /// Finds the tabulated ray u parallel to v and lambda with v = lambda u.
  std::pair<const TabulatedRay*, double> locate_ray(PhasePoint v) const {
    const double s = detail::ray_scale(v);
    for (const auto& r : std::get<3>(payload_)->rays) {
      const double us = r.ray.norm();
      if (std::abs(cocycle(r.ray, v)) <= 1e-12 * us * s) {
        const double lambda = (r.ray.mu * v.mu + r.ray.nu * v.nu) / (us * us);
        return {&r, lambda};
      }
    }
    throw InvalidInput("tabulated source has no ray through (" + std::to_string(v.mu) + ", " +
                       std::to_string(v.nu) + ")");
  }

  SourceKind kind_;
  Payload payload_;
};

namespace detail {

/// Trapezoid rule for int g(X) dX on `grid`, refining by halving the step
/// until successive estimates agree.
template <typename F>
double adaptive_trapezoid(const F& g, const GridSpec& grid, double rel_tol = 1e-12,
                          int max_refinements = 10) {
  grid.validate();
  std::size_t n = grid.n_x;
  auto trapezoid = [&](std::size_t count) {
    const double h = (grid.x_max - grid.x_min) / static_cast<double>(count - 1);
    double acc = 0.5 * (g(grid.x_min) + g(grid.x_max));
    for (std::size_t i = 1; i + 1 < count; ++i) acc += g(grid.x_min + h * static_cast<double>(i));
    return acc * h;
  };
  double prev = trapezoid(n);
  for (int r = 0; r < max_refinements; ++r) {
    n = 2 * n - 1;
    const double cur = trapezoid(n);
    if (!std::isfinite(cur)) break;
    if (std::abs(cur - prev) <= rel_tol * std::max(1.0, std::abs(cur))) return cur;
    prev = cur;
  }
  throw QuadratureError("trapezoid rule did not converge on [" + std::to_string(grid.x_min) +
                        ", " + std::to_string(grid.x_max) + "]");
}

}  // namespace detail

/// int W(X, v) dX; a quantum tomogram gives 1.
inline double check_normalization(const TomogramSource& src, PhasePoint v,
                                  std::optional<GridSpec> quad = std::nullopt) {
  const GridSpec grid = quad ? *quad : src.default_grid(v);
  return detail::adaptive_trapezoid([&](double X) { return src.evaluate(X, v); }, grid);
}

struct NonnegativityReport {
  double min_value = 0.0;
  double argmin = 0.0;
};

/// Scans W(., v) on the grid for its minimum.
inline NonnegativityReport check_nonnegativity(const TomogramSource& src, PhasePoint v,
                                               const GridSpec& grid) {
  grid.validate();
  NonnegativityReport r{std::numeric_limits<double>::infinity(), grid.x_min};
  for (std::size_t i = 0; i < grid.n_x; ++i) {
    const double X = grid.x(i);
    const double w = src.evaluate(X, v);
    if (w < r.min_value) r = {w, X};
  }
  return r;
}

struct HomogeneitySample {
  double x = 0.0;
  PhasePoint v;
  double lambda = 1.0;
};

/// max |W(lambda X, lambda v) - W(X, v) / |lambda||.
inline double check_homogeneity(const TomogramSource& src,
                                std::span<const HomogeneitySample> samples) {
  double worst = 0.0;
  for (const auto& smp : samples) {
    if (smp.lambda == 0.0) throw InvalidInput("homogeneity sample with lambda = 0");
    const double lhs = src.evaluate(smp.lambda * smp.x, smp.lambda * smp.v);
    const double rhs = src.evaluate(smp.x, smp.v) / std::abs(smp.lambda);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

/// <P^2> = int X^2 W(X, 0, 1) dX.
inline double second_moment_P(const TomogramSource& src,
                              std::optional<GridSpec> quad = std::nullopt) {
  const PhasePoint v{0.0, 1.0};
  const GridSpec grid = quad ? *quad : src.default_grid(v);
  return detail::adaptive_trapezoid([&](double X) { return X * X * src.evaluate(X, v); }, grid);
}

/// <Q^2> = int X^2 W(X, 1, 0) dX.
inline double second_moment_Q(const TomogramSource& src,
                              std::optional<GridSpec> quad = std::nullopt) {
  const PhasePoint v{1.0, 0.0};
  const GridSpec grid = quad ? *quad : src.default_grid(v);
  return detail::adaptive_trapezoid([&](double X) { return X * X * src.evaluate(X, v); }, grid);
}

}  // namespace qtomo
