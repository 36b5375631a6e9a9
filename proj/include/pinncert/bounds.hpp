#pragma once

// Growth bounds ||e^{At}|| <= M e^{omega t} for discretized generators, their
// verification against the matrix exponential, and limit extraction from
// sequences of discretizations (Cauchy-defect based).

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "pinncert/error.hpp"
#include "pinncert/linalg.hpp"
#include "pinncert/settings.hpp"

namespace pinncert::bounds {

enum class Strategy { symmetric, log_norm, schur_defective };

inline std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::symmetric: return "symmetric";
    case Strategy::log_norm: return "log_norm";
    case Strategy::schur_defective: return "schur_defective";
  }
  return "?";
}

struct GrowthBound {
  double M = 1.0;
  double omega = 0.0;
  Strategy method = Strategy::symmetric;
  // epsilon absorbed into omega (defective case only)
  double epsilon_shift = 0.0;

  // Schur-branch diagnostics
  std::size_t rho = 0;          // structural nilpotency degree of N
  double norm_N = 0.0;          // ||N||_2 of the retained strictly upper part
  double C_eps = 1.0;           // sup_t (sum_{k<=rho} t^k) e^{-eps t}, inflated by the safety factor
  double perturbation_shift = 0.0;  // added to omega for dropped entries and Schur backward error
};

namespace detail {

/// log of sum_{k=0}^{rho} t^k, overflow safe.
inline double log_poly_sum(double t, std::size_t rho) {
  if (t <= 1.0) {
    double s = 0.0, p = 1.0;
    for (std::size_t k = 0; k <= rho; ++k) {
      s += p;
      p *= t;
    }
    return std::log(s);
  }
  // t^rho * sum_k t^{k - rho}
  double s = 0.0, p = 1.0;
  const double inv = 1.0 / t;
  for (std::size_t k = 0; k <= rho; ++k) {
    s += p;
    p *= inv;
  }
  return static_cast<double>(rho) * std::log(t) + std::log(s);
}

}  // namespace detail

/// C_eps = sup_{t >= 0} (sum_{k<=rho} t^k) e^{-eps t}. The maximizer lies in
/// [0, rho/eps]; a uniform scan locates the peak bracket, golden-section search
/// refines it, and the result is inflated by (1 + safety).
inline double polynomial_exponential_sup(std::size_t rho, double eps, const NumericSettings& cfg = default_settings()) {
  if (!(eps > 0.0)) throw Error(Errc::BadEpsilon, "epsilon must be > 0");
  if (rho == 0) return 1.0;
  auto logf = [&](double t) { return detail::log_poly_sum(t, rho) - eps * t; };
  const double hi = static_cast<double>(rho) / eps + 1.0;
  constexpr int scan = 4096;
  int best = 0;
  double best_val = logf(0.0);
  for (int i = 1; i <= scan; ++i) {
    const double v = logf(hi * i / scan);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  double a = hi * std::max(best - 1, 0) / scan;
  double b = hi * std::min(best + 1, scan) / scan;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = logf(c), fd = logf(d);
  while (b - a > cfg.golden_tol * std::max(1.0, b)) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = logf(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = logf(d);
    }
  }
  best_val = std::max({best_val, fc, fd, logf(a), logf(b)});
  const double value = std::exp(best_val) * (1.0 + cfg.golden_safety);
  if (!std::isfinite(value)) throw Error(Errc::NonFinite, "C_eps overflows; reduce matrix size or increase epsilon");
  return value;
}

/// Longest chain i0 < i1 < ... with nonzero N(i_k, i_{k+1}); any product of
/// rho + 1 such strictly upper factors (diagonals interleaved) vanishes.
inline std::size_t structural_nilpotency(const std::vector<std::vector<bool>>& nz) {
  const std::size_t n = nz.size();
  std::vector<std::size_t> longest(n, 0);  // longest path starting at i
  std::size_t best = 0;
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = i + 1; j < n; ++j)
      if (nz[i][j]) longest[i] = std::max(longest[i], longest[j] + 1);
    best = std::max(best, longest[i]);
  }
  return best;
}

inline GrowthBound growth_bound(const DenseMatrix& a, Strategy strategy, double epsilon = 0.0,
                                const NumericSettings& cfg = default_settings()) {
  if (!a.square()) throw Error(Errc::NonSquare, "growth_bound needs a square matrix");
  if (a.rows() == 0) throw Error(Errc::Empty, "growth_bound of an empty matrix");
  GrowthBound gb;
  gb.method = strategy;
  switch (strategy) {
    case Strategy::symmetric: {
      if (!is_symmetric(a, cfg.symmetry_tol)) throw Error(Errc::NotSymmetric, "symmetric strategy on asymmetric input");
      gb.omega = max_eigenvalue_symmetric(a, cfg);
      return gb;
    }
    case Strategy::log_norm: {
      gb.omega = max_eigenvalue_symmetric(symmetric_part(a), cfg);
      return gb;
    }
    case Strategy::schur_defective: break;
  }

  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw Error(Errc::BadEpsilon, "schur_defective needs epsilon > 0");
  const std::size_t n = a.rows();
  const ComplexSchur schur = complex_schur(a, cfg);
  double re_max = -std::numeric_limits<double>::infinity();
  double tmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    re_max = std::max(re_max, schur.t(i, i).real());
    for (std::size_t j = i; j < n; ++j) tmax = std::max(tmax, std::abs(schur.t(i, j)));
  }
  // entries at roundoff level are moved into a perturbation E with
  // ||e^{(B+E)t}|| <= M e^{(omega + M ||E||) t}
  const double drop = 64.0 * std::numeric_limits<double>::epsilon() * tmax;
  ComplexMatrix kept(n, n);
  std::vector<std::vector<bool>> nz(n, std::vector<bool>(n, false));
  double dropped_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const cplx v = schur.t(i, j);
      if (std::abs(v) > drop) {
        kept(i, j) = v;
        nz[i][j] = true;
      } else {
        dropped_sq += std::norm(v);
      }
    }
  gb.rho = structural_nilpotency(nz);
  gb.norm_N = gb.rho == 0 ? 0.0 : spectral_norm(kept.realify(), cfg);
  double poly = 0.0, term = 1.0;
  for (std::size_t k = 0; k <= gb.rho; ++k) {
    poly += term;
    term *= gb.norm_N / static_cast<double>(k + 1);
  }
  gb.C_eps = polynomial_exponential_sup(gb.rho, epsilon, cfg);
  gb.M = std::max(1.0, poly * gb.C_eps);
  if (!std::isfinite(gb.M)) throw Error(Errc::NonFinite, "schur_defective M overflows");
  // Schur backward error ~ n u ||A||_F plus the dropped entries
  const double backward = 8.0 * static_cast<double>(n) * std::numeric_limits<double>::epsilon() * a.frobenius();
  gb.perturbation_shift = gb.M * (std::sqrt(dropped_sq) + backward);
  gb.epsilon_shift = epsilon;
  gb.omega = re_max + epsilon + gb.perturbation_shift;
  return gb;
}

struct VerificationReport {
  double worst_ratio = 0.0;  // max_t ||e^{At}|| / (M e^{omega t})
  double worst_t = 0.0;
  std::size_t checked = 0;
};

/// Checks ||e^{At}||_2 <= M e^{omega t} (1 + slack) on every grid point.
/// Throws ViolationFound carrying the offending t and ratio.
inline VerificationReport verify_growth_bound(const DenseMatrix& a, const GrowthBound& gb,
                                              const std::vector<double>& t_grid,
                                              const NumericSettings& cfg = default_settings()) {
  if (!a.square()) throw Error(Errc::NonSquare, "verify_growth_bound");
  const bool sym = is_symmetric(a, cfg.symmetry_tol);
  std::vector<double> ratios(t_grid.size());
  VerificationReport rep;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double t = t_grid[i];
    if (!(t >= 0.0)) throw Error(Errc::BadSize, "t_grid must lie in [0, inf)");
    const DenseMatrix e = sym ? expm_symmetric(a, t, cfg) : expm(t * a);
    const double nrm = spectral_norm(e, cfg);
    const double bound = gb.M * std::exp(gb.omega * t);
    const double ratio = nrm / bound;
    if (ratio > rep.worst_ratio || rep.checked == 0) {
      rep.worst_ratio = ratio;
      rep.worst_t = t;
    }
    ++rep.checked;
    if (ratio > 1.0 + cfg.growth_check_slack)
      throw Error(Errc::ViolationFound, "bound violated at t=" + std::to_string(t) + " ratio=" + std::to_string(ratio));
  }
  return rep;
}

inline std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
  std::vector<double> t(count);
  if (count == 1) {
    t[0] = lo;
    return t;
  }
  const double a = std::log10(lo), b = std::log10(hi);
  for (std::size_t i = 0; i < count; ++i) t[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / (count - 1.0));
  return t;
}

// ---------------------------------------------------------------------------
// Limits of discretization sequences

struct BoundSequence {
  std::vector<std::size_t> indices;
  std::vector<double> M_values;
  std::vector<double> omega_values;
  double mu_p = 1.0;
  double mu_e = 1.0;

  void validate() const {
    if (M_values.size() != indices.size() || omega_values.size() != indices.size())
      throw Error(Errc::ShapeMismatch, "BoundSequence lengths disagree");
    for (std::size_t i = 1; i < indices.size(); ++i)
      if (indices[i] <= indices[i - 1]) throw Error(Errc::InvalidConfig, "indices must be strictly increasing");
  }
};

struct LimitEstimate {
  double value = 0.0;
  double cauchy_defect = 0.0;
  double tolerance = 0.0;
  bool converged = false;

  /// value + defect in strict mode, the plain value otherwise.
  double bound(bool strict) const { return strict ? value + cauchy_defect : value; }
};

namespace detail {
inline LimitEstimate tail_limit(const std::vector<double>& values, std::size_t tail, double tol) {
  LimitEstimate est;
  est.value = values.back();
  est.tolerance = tol;
  for (std::size_t i = values.size() - tail + 1; i < values.size(); ++i)
    est.cauchy_defect = std::max(est.cauchy_defect, std::abs(values[i] - values[i - 1]));
  est.converged = est.cauchy_defect <= tol;
  return est;
}
}  // namespace detail

struct GrowthLimit {
  LimitEstimate M_star;
  LimitEstimate omega_star;
};

/// omega* = last omega, M* = mu_p mu_e (last M), each with the max successive
/// increment over the last `tail` entries as Cauchy defect.
inline GrowthLimit sequence_limit(const BoundSequence& s, std::size_t tail, double tol) {
  s.validate();
  if (tail < 2 || s.indices.size() < tail) throw Error(Errc::TooShort, "sequence shorter than tail (tail >= 2)");
  if (!(s.mu_p > 0.0) || !(s.mu_e > 0.0)) throw Error(Errc::InvalidConfig, "mu_p and mu_e must be > 0");
  std::vector<double> scaled(s.M_values.size());
  for (std::size_t i = 0; i < scaled.size(); ++i) scaled[i] = s.mu_p * s.mu_e * s.M_values[i];
  return {detail::tail_limit(scaled, tail, tol), detail::tail_limit(s.omega_values, tail, tol)};
}

/// Norms mu_e ||M_k||_2 along a refinement sequence and their limit estimate.
struct NormSequence {
  std::vector<double> values;
  LimitEstimate limit;
};

inline NormSequence operator_norm_sequence(const std::vector<DenseMatrix>& matrices, double mu_e, std::size_t tail,
                                           double tol, const NumericSettings& cfg = default_settings()) {
  if (tail < 2 || matrices.size() < tail) throw Error(Errc::TooShort, "sequence shorter than tail (tail >= 2)");
  for (const auto& m : matrices)
    if (m.cols() != matrices.front().cols()) throw Error(Errc::ShapeMismatch, "matrices must share the U dimension");
  NormSequence out;
  out.values.reserve(matrices.size());
  for (const auto& m : matrices) out.values.push_back(m.empty() ? 0.0 : mu_e * spectral_norm(m, cfg));
  out.limit = detail::tail_limit(out.values, tail, tol);
  return out;
}

inline LimitEstimate operator_norm_limit(const std::vector<DenseMatrix>& matrices, double mu_e, std::size_t tail,
                                         double tol, const NumericSettings& cfg = default_settings()) {
  return operator_norm_sequence(matrices, mu_e, tail, tol, cfg).limit;
}

/// Limit estimate of an already computed scalar sequence.
inline LimitEstimate scalar_limit(const std::vector<double>& values, std::size_t tail, double tol) {
  if (tail < 2 || values.size() < tail) throw Error(Errc::TooShort, "sequence shorter than tail (tail >= 2)");
  return detail::tail_limit(values, tail, tol);
}

}  // namespace pinncert::bounds
