#pragma once

// Finite-difference model of the 1D heat equation x_t = alpha x_xx on [0, 1]
// with Dirichlet boundary input: grid operators, projection/embedding pair,
// affine boundary lift, closed-form growth bounds and reference solutions.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <utility>
#include <variant>
#include <vector>

#include "pinncert/error.hpp"
#include "pinncert/linalg.hpp"
#include "pinncert/settings.hpp"

namespace pinncert::heat1d {

using ScalarField = std::function<double(double)>;
using BoundaryData = std::function<std::pair<double, double>(double)>;
using SpaceTimeField = std::function<double(double, double)>;

struct HeatProblem {
  double alpha = 0.2;
  double t_end = 0.5;
  ScalarField initial;
  BoundaryData boundary;

  void validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error(Errc::InvalidConfig, "alpha must be > 0");
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw Error(Errc::InvalidConfig, "t_end must be > 0");
    if (!initial) throw Error(Errc::InvalidConfig, "initial condition missing");
    if (!boundary) throw Error(Errc::InvalidConfig, "boundary data missing");
  }
};

inline BoundaryData homogeneous_boundary() {
  return [](double) { return std::pair<double, double>{0.0, 0.0}; };
}

/// Default problem: alpha = 0.2, T = [0, 0.5], x0 = sin(pi x), zero boundary.
inline HeatProblem default_problem() {
  return {0.2, 0.5, [](double x) { return std::sin(std::numbers::pi * x); }, homogeneous_boundary()};
}

inline double grid_spacing(std::size_t n) { return 1.0 / static_cast<double>(n + 1); }
inline double grid_node(std::size_t n, std::size_t k) { return static_cast<double>(k) * grid_spacing(n); }

/// Element of Z_n: values at the interior nodes x_k = k/(n+1), k = 1..n.
class GridFunction1D {
 public:
  GridFunction1D() = default;
  explicit GridFunction1D(Vector values) : values_(std::move(values)) {}

  std::size_t n() const noexcept { return values_.size(); }
  double spacing() const { return grid_spacing(n()); }
  const Vector& values() const noexcept { return values_; }
  // k is 1-based to match the node numbering
  double at(std::size_t k) const { return values_[k - 1]; }

  /// Delta-weighted discrete L2 norm.
  double norm() const {
    double s = 0.0;
    for (double v : values_) s += v * v;
    return std::sqrt(spacing() * s);
  }

 private:
  Vector values_;
};

struct HeatDiscretization {
  std::size_t n = 0;
  double alpha = 0.0;
  DenseMatrix A;  // n x n, tridiag(alpha/D^2, -2 alpha/D^2, alpha/D^2)
  DenseMatrix D;  // n x 2 boundary input
};

inline HeatDiscretization assemble(std::size_t n, double alpha) {
  if (n == 0) throw Error(Errc::BadSize, "need at least one interior node");
  if (!(alpha > 0.0)) throw Error(Errc::InvalidConfig, "alpha must be > 0");
  const double h = grid_spacing(n);
  const double c = alpha / (h * h);
  DenseMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    a(i, i) = -2.0 * c;
    if (i + 1 < n) {
      a(i, i + 1) = c;
      a(i + 1, i) = c;
    }
  }
  DenseMatrix d(n, 2);
  d(0, 0) = c;
  d(n - 1, 1) = c;
  return {n, alpha, std::move(a), std::move(d)};
}

/// Closed-form spectrum -4 alpha / D^2 sin^2(pi j / (2(n+1))), j = 1..n (descending).
inline std::vector<double> closed_form_eigenvalues(std::size_t n, double alpha) {
  const double h = grid_spacing(n);
  std::vector<double> lam(n);
  for (std::size_t j = 1; j <= n; ++j) {
    const double s = std::sin(std::numbers::pi * static_cast<double>(j) / (2.0 * static_cast<double>(n + 1)));
    lam[j - 1] = -4.0 * alpha / (h * h) * s * s;
  }
  return lam;
}

/// Growth bound of e^{A_n t}: the largest eigenvalue, -alpha (2(n+1) sin(pi/(2(n+1))))^2.
inline double omega_n(std::size_t n, double alpha) {
  if (n == 0) throw Error(Errc::BadSize, "n must be >= 1");
  // extended precision so small cases round to their exact values
  const long double np1 = static_cast<long double>(n + 1);
  const long double v = 2.0L * np1 * std::sin(std::numbers::pi_v<long double> / (2.0L * np1));
  return static_cast<double>(-static_cast<long double>(alpha) * v * v);
}

inline double omega_limit(double alpha) { return -alpha * std::numbers::pi * std::numbers::pi; }

// ---------------------------------------------------------------------------
// Quadrature

namespace detail {
inline double simpson_rec(const ScalarField& f, double a, double b, double fa, double fm, double fb, double whole,
                          double tol, int depth, int max_depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (!std::isfinite(delta)) throw Error(Errc::QuadratureFailure, "integrand not finite");
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  // interval at floating-point resolution (jump in the integrand): accept as is
  if (b - a <= 64.0 * std::numeric_limits<double>::epsilon() * std::max({std::abs(a), std::abs(b), 1e-300}))
    return left + right;
  if (depth >= max_depth) throw Error(Errc::QuadratureFailure, "adaptive Simpson depth limit reached");
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, max_depth) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, max_depth);
}
}  // namespace detail

/// Adaptive Simpson quadrature with absolute tolerance.
inline double integrate(const ScalarField& f, double a, double b, double abs_tol = default_settings().quad_abs_tol,
                        int max_depth = default_settings().quad_max_depth) {
  if (a == b) return 0.0;
  // split once up front so symmetric integrands cannot fool the first estimate
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double flm = f(0.5 * (a + m)), frm = f(0.5 * (m + b));
  const double l = detail::simpson_rec(f, a, m, fa, flm, fm, (m - a) / 6.0 * (fa + 4.0 * flm + fm), 0.5 * abs_tol, 1,
                                       max_depth);
  const double r = detail::simpson_rec(f, m, b, fm, frm, fb, (b - m) / 6.0 * (fm + 4.0 * frm + fb), 0.5 * abs_tol, 1,
                                       max_depth);
  return l + r;
}

// ---------------------------------------------------------------------------
// Projection P_n (cell averages) and embedding E_n (piecewise constant).

inline GridFunction1D project(const ScalarField& x, std::size_t n,
                              const NumericSettings& cfg = default_settings()) {
  if (n == 0) throw Error(Errc::BadSize, "n must be >= 1");
  const double h = grid_spacing(n);
  std::vector<double> v(n);
  for (std::size_t k = 1; k <= n; ++k) {
    const double c = grid_node(n, k);
    v[k - 1] = integrate(x, c - 0.5 * h, c + 0.5 * h, cfg.quad_abs_tol * h, cfg.quad_max_depth) / h;
  }
  return GridFunction1D(Vector(std::move(v)));
}

/// Piecewise-constant function: z_k on [x_k - D/2, x_k + D/2), zero elsewhere.
inline ScalarField embed(const GridFunction1D& z) {
  const std::size_t n = z.n();
  const double h = grid_spacing(n);
  std::vector<double> vals(z.values().begin(), z.values().end());
  return [vals = std::move(vals), n, h](double x) {
    // cell k covers [(k - 1/2) h, (k + 1/2) h)
    const double s = x / h + 0.5;
    if (!(s >= 1.0)) return 0.0;
    const auto k = static_cast<std::size_t>(std::floor(s));
    if (k < 1 || k > n) return 0.0;
    return vals[k - 1];
  };
}

/// L2 norm of E_n z, summed cell by cell (equals the Z_n norm).
inline double embedded_l2_norm(const GridFunction1D& z) {
  double s = 0.0;
  const double h = z.spacing();
  for (double v : z.values()) s += h * v * v;
  return std::sqrt(s);
}

/// L2(0,1) norm by adaptive quadrature.
inline double l2_norm(const ScalarField& f, double abs_tol = 1e-13) {
  return std::sqrt(integrate([&](double x) { return f(x) * f(x); }, 0.0, 1.0, abs_tol));
}

// ---------------------------------------------------------------------------
// Boundary lift D0 and norms on U = R^2.

enum class UNorm { euclidean, max, one };

inline double u_norm(std::pair<double, double> b, UNorm kind) {
  switch (kind) {
    case UNorm::euclidean: return std::hypot(b.first, b.second);
    case UNorm::max: return std::max(std::abs(b.first), std::abs(b.second));
    case UNorm::one: return std::abs(b.first) + std::abs(b.second);
  }
  return 0.0;
}

/// Constant 2/3 quoted for the heat lift; usable as an override of the computed bound.
inline constexpr double kCompatNormD0 = 2.0 / 3.0;

/// Affine interpolant x -> x b2 + (1 - x) b1.
inline ScalarField lift_D0(std::pair<double, double> b) {
  return [b](double x) { return x * b.second + (1.0 - x) * b.first; };
}

struct LiftNorms {
  double normD0 = 0.0;
  double normAD0 = 0.0;
};

/// Certified upper bounds on ||D0||_{U->L2} for the chosen U-norm; ||A D0|| = 0 (affine lift).
/// Gram matrix of the lift is [[1/3, 1/6], [1/6, 1/3]]:
///   euclidean: sqrt(lambda_max) = sqrt(1/2); max: ||1||_L2 = 1 at b = (1, 1);
///   one: extreme points (+-1, 0) give 1/sqrt(3).
inline LiftNorms lift_norms(UNorm kind) {
  const double up = std::numeric_limits<double>::infinity();
  switch (kind) {
    case UNorm::euclidean: return {std::nextafter(std::sqrt(0.5), up), 0.0};
    case UNorm::max: return {1.0, 0.0};
    case UNorm::one: return {std::nextafter(1.0 / std::sqrt(3.0), up), 0.0};
  }
  return {};
}

// ---------------------------------------------------------------------------
// Reference solutions

struct AnalyticSine {
  // x0(x) = sum_k coeffs[k-1] sin(k pi x)
  std::vector<double> coeffs;
};

struct CrankNicolson {
  std::size_t n_ref = 400;
  double dt = 1e-3;
};

using ReferenceMode = std::variant<AnalyticSine, CrankNicolson>;

inline bool boundary_is_homogeneous(const HeatProblem& p, int samples = 101) {
  for (int i = 0; i <= samples; ++i) {
    const auto [l, r] = p.boundary(p.t_end * i / samples);
    if (l != 0.0 || r != 0.0) return false;
  }
  return true;
}

/// Sine-series solution sum_k c_k exp(-alpha k^2 pi^2 t) sin(k pi x).
inline SpaceTimeField analytic_sine_solution(double alpha, std::vector<double> coeffs) {
  return [alpha, coeffs = std::move(coeffs)](double t, double x) {
    double u = 0.0;
    for (std::size_t k = 1; k <= coeffs.size(); ++k) {
      const double kp = static_cast<double>(k) * std::numbers::pi;
      u += coeffs[k - 1] * std::exp(-alpha * kp * kp * t) * std::sin(kp * x);
    }
    return u;
  };
}

namespace detail {
// Solves a constant-coefficient tridiagonal system (sub = sup = off, diag = d).
inline void thomas_constant(double off, double d, std::vector<double>& rhs, std::vector<double>& scratch) {
  const std::size_t n = rhs.size();
  scratch.assign(n, 0.0);
  double denom = d;
  scratch[0] = off / denom;
  rhs[0] /= denom;
  for (std::size_t i = 1; i < n; ++i) {
    denom = d - off * scratch[i - 1];
    scratch[i] = off / denom;
    rhs[i] = (rhs[i] - off * rhs[i - 1]) / denom;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= scratch[i] * rhs[i + 1];
}
}  // namespace detail

/// Crank-Nicolson on the n_ref-node grid, boundary input folded through D_n.
/// The returned field interpolates linearly in space (including boundary nodes) and time.
inline SpaceTimeField crank_nicolson_solution(const HeatProblem& p, CrankNicolson cfg) {
  if (cfg.n_ref < 3) throw Error(Errc::BadSize, "crank_nicolson needs n_ref >= 3");
  if (!(cfg.dt > 0.0)) throw Error(Errc::BadSize, "crank_nicolson needs dt > 0");
  const std::size_t n = cfg.n_ref;
  const auto steps = static_cast<std::size_t>(std::ceil(p.t_end / cfg.dt - 1e-12));
  const double dt = p.t_end / static_cast<double>(steps);
  const double h = grid_spacing(n);
  const double c = p.alpha / (h * h);

  // frames[s] holds n + 2 values: boundary, interior, boundary
  auto frames = std::make_shared<std::vector<std::vector<double>>>(steps + 1, std::vector<double>(n + 2));
  {
    auto& f0 = (*frames)[0];
    for (std::size_t k = 1; k <= n; ++k) f0[k] = p.initial(grid_node(n, k));
    const auto [l, r] = p.boundary(0.0);
    f0[0] = l;
    f0[n + 1] = r;
  }
  std::vector<double> rhs(n), scratch;
  for (std::size_t s = 0; s < steps; ++s) {
    const auto& cur = (*frames)[s];
    auto& next = (*frames)[s + 1];
    const double t1 = static_cast<double>(s + 1) * dt;
    const auto [l1, r1] = p.boundary(t1);
    for (std::size_t k = 1; k <= n; ++k) {
      const double lap = cur[k - 1] - 2.0 * cur[k] + cur[k + 1];  // includes boundary at t_s
      rhs[k - 1] = cur[k] + 0.5 * dt * c * lap;
    }
    rhs[0] += 0.5 * dt * c * l1;
    rhs[n - 1] += 0.5 * dt * c * r1;
    detail::thomas_constant(-0.5 * dt * c, 1.0 + dt * c, rhs, scratch);
    next[0] = l1;
    next[n + 1] = r1;
    for (std::size_t k = 1; k <= n; ++k) next[k] = rhs[k - 1];
  }
  return [frames, n, h, dt, steps](double t, double x) {
    const double ts = std::clamp(t / dt, 0.0, static_cast<double>(steps));
    auto s0 = static_cast<std::size_t>(std::floor(ts));
    if (s0 >= steps) s0 = steps > 0 ? steps - 1 : 0;
    const double wt = steps > 0 ? ts - static_cast<double>(s0) : 0.0;
    const double xs = std::clamp(x / h, 0.0, static_cast<double>(n + 1));
    auto k0 = static_cast<std::size_t>(std::floor(xs));
    if (k0 > n) k0 = n;
    const double wx = xs - static_cast<double>(k0);
    auto at = [&](std::size_t s) {
      const auto& f = (*frames)[s];
      return (1.0 - wx) * f[k0] + wx * f[k0 + 1];
    };
    if (steps == 0) return at(0);
    return (1.0 - wt) * at(s0) + wt * at(s0 + 1);
  };
}

inline SpaceTimeField reference_solution(const HeatProblem& p, const ReferenceMode& mode) {
  p.validate();
  if (const auto* a = std::get_if<AnalyticSine>(&mode)) {
    if (!boundary_is_homogeneous(p))
      throw Error(Errc::ModeMismatch, "analytic sine reference requires homogeneous boundary data");
    return analytic_sine_solution(p.alpha, a->coeffs);
  }
  return crank_nicolson_solution(p, std::get<CrankNicolson>(mode));
}

// ---------------------------------------------------------------------------
// Discrete-semigroup convergence diagnostics

/// || E_n e^{A_n t} P_n x0 - exact(t, .) ||_{L2(0,1)}, integrated cell by cell.
inline double discrete_semigroup_l2_error(std::size_t n, double alpha, double t, const ScalarField& x0,
                                          const SpaceTimeField& exact) {
  const auto disc = assemble(n, alpha);
  const GridFunction1D p0 = project(x0, n);
  const Vector zt = expm_action(disc.A, t, p0.values());
  const double h = grid_spacing(n);
  auto sq = [&](double value) { return [&, value](double s) { const double d = value - exact(t, s); return d * d; }; };
  double acc = integrate(sq(0.0), 0.0, 0.5 * h, 1e-15) + integrate(sq(0.0), 1.0 - 0.5 * h, 1.0, 1e-15);
  for (std::size_t k = 1; k <= n; ++k) {
    const double c = grid_node(n, k);
    acc += integrate(sq(zt[k - 1]), c - 0.5 * h, c + 0.5 * h, 1e-15);
  }
  return std::sqrt(acc);
}

/// || e^{A_n t} P_n x0 - P_n exact(t, .) ||_{Z_n}.
inline double discrete_semigroup_projected_error(std::size_t n, double alpha, double t, const ScalarField& x0,
                                                 const SpaceTimeField& exact) {
  const auto disc = assemble(n, alpha);
  const Vector zt = expm_action(disc.A, t, project(x0, n).values());
  const GridFunction1D pt = project([&](double s) { return exact(t, s); }, n);
  std::vector<double> d(n);
  for (std::size_t k = 0; k < n; ++k) d[k] = zt[k] - pt.values()[k];
  return GridFunction1D(Vector(std::move(d))).norm();
}

}  // namespace pinncert::heat1d
