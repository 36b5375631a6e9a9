#pragma once

// A posteriori error certificate for approximate mild solutions:
//
//   eps(t) = ||D0|| ||db(t)|| + M e^{wt} ||d0 - D0 db(0)||
//          + int_0^t M e^{w(t-s)} (||AD0|| ||db(s)|| + ||D0|| ||db'(s)|| + ||d(s)||) ds
//
// evaluated on the residual sampling grid, split into its individual contributions.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pinncert/csv.hpp"
#include "pinncert/error.hpp"

namespace pinncert::certifier {

struct ResidualTrace {
  std::vector<double> times;         // strictly increasing, times[0] == 0
  std::vector<double> delta_Z;       // ||d(t_i)||_Z
  std::vector<double> delta_b_U;     // ||db(t_i)||_U
  std::vector<double> delta_bdot_U;  // ||db'(t_i)||_U
  double delta0_Z = 0.0;             // ||d0||_Z
  double delta0_shifted_Z = 0.0;     // ||d0 - D0 db(0)||_Z

  /// Structural checks; with normD0 given also the triangle-inequality consistency.
  void validate(std::optional<double> normD0 = std::nullopt) const {
    const std::size_t n = times.size();
    if (n == 0) throw Error(Errc::InvalidTrace, "empty time grid");
    if (delta_Z.size() != n || delta_b_U.size() != n || delta_bdot_U.size() != n)
      throw Error(Errc::InvalidTrace, "residual series lengths differ from the time grid");
    if (times[0] != 0.0) throw Error(Errc::InvalidTrace, "time grid must start at 0");
    for (std::size_t i = 1; i < n; ++i)
      if (!(times[i] > times[i - 1]) || !std::isfinite(times[i]))
        throw Error(Errc::InvalidTrace, "times must be finite and strictly increasing");
    auto check = [](double v, const char* what) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw Error(Errc::InvalidTrace, std::string(what) + " must be finite and >= 0");
    };
    for (std::size_t i = 0; i < n; ++i) {
      check(delta_Z[i], "delta_Z");
      check(delta_b_U[i], "delta_b_U");
      check(delta_bdot_U[i], "delta_bdot_U");
    }
    check(delta0_Z, "delta0_Z");
    check(delta0_shifted_Z, "delta0_shifted_Z");
    if (normD0 && delta0_shifted_Z > delta0_Z + *normD0 * delta_b_U[0] + 1e-12)
      throw Error(Errc::InvalidTrace, "delta0_shifted_Z exceeds the triangle-inequality bound");
  }
};

struct CertificateConfig {
  double M = 1.0;
  double omega = 0.0;
  double normD0 = 0.0;
  double normAD0 = 0.0;
  // split: eps_init uses ||d0|| and eps_b0 = M e^{wt} ||D0|| ||db(0)||;
  // combined: eps_init uses ||d0 - D0 db(0)|| and eps_b0 = 0
  bool split_initial = false;
  // strict mode: each trapezoid panel is inflated by (1 + L dt^2 / 8)
  std::optional<double> curvature_cap;

  void validate() const {
    if (!(M >= 1.0) || !std::isfinite(M)) throw Error(Errc::InvalidConfig, "M must be >= 1");
    if (!std::isfinite(omega)) throw Error(Errc::InvalidConfig, "omega must be finite");
    if (!(normD0 >= 0.0) || !std::isfinite(normD0)) throw Error(Errc::InvalidConfig, "normD0 must be >= 0");
    if (!(normAD0 >= 0.0) || !std::isfinite(normAD0)) throw Error(Errc::InvalidConfig, "normAD0 must be >= 0");
    if (curvature_cap && !(*curvature_cap >= 0.0)) throw Error(Errc::InvalidConfig, "curvature cap must be >= 0");
  }
};

struct CertificateReport {
  std::vector<double> times;
  std::vector<double> eps_init;
  std::vector<double> eps_b0;
  std::vector<double> eps_bt;
  std::vector<double> eps_b_int1;
  std::vector<double> eps_b_int2;
  std::vector<double> eps_evo;
  std::vector<double> eps_tot;
  // largest time step of the quadrature grid; the integrals are second-order accurate in it
  double max_dt = 0.0;
  bool strict = false;
};

/// Prefix integrals I_i = int_0^{t_i} e^{w(t_i - s)} v(s) ds by the recursion
/// I_{i+1} = e^{w h} I_i + h/2 (e^{w h} v_i + v_{i+1}).
inline std::vector<double> exp_kernel_prefix(const std::vector<double>& times, const std::vector<double>& values,
                                             double omega, std::optional<double> curvature_cap = std::nullopt) {
  if (times.size() != values.size()) throw Error(Errc::ShapeMismatch, "times/values length differ");
  std::vector<double> out(times.size(), 0.0);
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double h = times[i] - times[i - 1];
    const double decay = std::exp(omega * h);
    double panel = 0.5 * h * (decay * values[i - 1] + values[i]);
    if (curvature_cap) panel *= 1.0 + *curvature_cap * h * h / 8.0;
    out[i] = decay * out[i - 1] + panel;
  }
  return out;
}

inline double exp_kernel_integral(const std::vector<double>& times, const std::vector<double>& values, double omega,
                                  std::size_t t_index) {
  if (t_index >= times.size()) throw Error(Errc::BadSize, "t_index out of range");
  for (double v : values)
    if (!(v >= 0.0)) throw Error(Errc::InvalidTrace, "kernel integrand values must be >= 0");
  const std::vector<double> head(times.begin(), times.begin() + static_cast<std::ptrdiff_t>(t_index + 1));
  const std::vector<double> vals(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(t_index + 1));
  return exp_kernel_prefix(head, vals, omega).back();
}

inline CertificateReport certify(const ResidualTrace& trace, const CertificateConfig& cfg) {
  cfg.validate();
  trace.validate(cfg.normD0);
  const std::size_t n = trace.times.size();
  CertificateReport r;
  r.times = trace.times;
  r.strict = cfg.curvature_cap.has_value();
  for (std::size_t i = 1; i < n; ++i) r.max_dt = std::max(r.max_dt, trace.times[i] - trace.times[i - 1]);

  std::vector<double> b_scaled(n), bdot_scaled(n), evo(n);
  for (std::size_t i = 0; i < n; ++i) {
    b_scaled[i] = cfg.M * cfg.normAD0 * trace.delta_b_U[i];
    bdot_scaled[i] = cfg.M * cfg.normD0 * trace.delta_bdot_U[i];
    evo[i] = cfg.M * trace.delta_Z[i];
  }
  r.eps_b_int1 = exp_kernel_prefix(trace.times, b_scaled, cfg.omega, cfg.curvature_cap);
  r.eps_b_int2 = exp_kernel_prefix(trace.times, bdot_scaled, cfg.omega, cfg.curvature_cap);
  r.eps_evo = exp_kernel_prefix(trace.times, evo, cfg.omega, cfg.curvature_cap);

  r.eps_init.resize(n);
  r.eps_b0.resize(n);
  r.eps_bt.resize(n);
  r.eps_tot.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double envelope = cfg.M * std::exp(cfg.omega * trace.times[i]);
    r.eps_bt[i] = cfg.normD0 * trace.delta_b_U[i];
    if (cfg.split_initial) {
      r.eps_init[i] = envelope * trace.delta0_Z;
      r.eps_b0[i] = envelope * cfg.normD0 * trace.delta_b_U[0];
    } else {
      r.eps_init[i] = envelope * trace.delta0_shifted_Z;
      r.eps_b0[i] = 0.0;
    }
    r.eps_tot[i] = r.eps_init[i] + r.eps_b0[i] + r.eps_bt[i] + r.eps_b_int1[i] + r.eps_b_int2[i] + r.eps_evo[i];
  }
  return r;
}

struct DominanceReport {
  double min_margin = 0.0;  // min_i eps_tot[i] - eps_ref[i]
  bool dominated = false;
  std::vector<double> ratio;  // eps_tot / eps_ref (inf where eps_ref == 0)
};

inline DominanceReport compare_to_reference(const CertificateReport& report, const std::vector<double>& eps_ref) {
  if (eps_ref.size() != report.eps_tot.size()) throw Error(Errc::GridMismatch, "reference error grid differs");
  DominanceReport d;
  d.min_margin = std::numeric_limits<double>::infinity();
  double max_tot = 0.0;
  d.ratio.resize(eps_ref.size());
  for (std::size_t i = 0; i < eps_ref.size(); ++i) {
    d.min_margin = std::min(d.min_margin, report.eps_tot[i] - eps_ref[i]);
    max_tot = std::max(max_tot, report.eps_tot[i]);
    d.ratio[i] = eps_ref[i] == 0.0 ? std::numeric_limits<double>::infinity() : report.eps_tot[i] / eps_ref[i];
  }
  if (eps_ref.empty()) d.min_margin = 0.0;
  d.dominated = d.min_margin >= -1e-12 * max_tot;
  return d;
}

/// eps_bt / eps_b_int2; undefined (nullopt) until the denominator first becomes positive.
inline std::vector<std::optional<double>> boundary_ratio(const CertificateReport& report) {
  std::vector<std::optional<double>> out(report.eps_bt.size());
  bool started = false;
  for (std::size_t i = 0; i < out.size(); ++i) {
    started = started || report.eps_b_int2[i] > 0.0;
    if (started && report.eps_b_int2[i] > 0.0) out[i] = report.eps_bt[i] / report.eps_b_int2[i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV output

inline constexpr const char* kHeatHeader = "t,E_ref,E_tot,E_init,E_PI,E_bc_sum_ubt,E_bc_int_ubdot,bc_sububt_by_intubdot";
inline constexpr const char* kGeneralHeader = "t,E_init,E_PI,E_bc_int_ub,E_bc_int_ubdot,E_bc_sum_ubt,E_bc_sum_ub0,E_tot,E_ref";

/// Heat schema. E_init folds in eps_b0 when the split form was used so the row still sums to E_tot.
inline void write_heat_csv(std::ostream& out, const CertificateReport& r,
                           const std::optional<std::vector<double>>& eps_ref = std::nullopt) {
  if (eps_ref && eps_ref->size() != r.times.size()) throw Error(Errc::GridMismatch, "reference error grid differs");
  const auto ratio = boundary_ratio(r);
  csv::write_header(out, kHeatHeader);
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    csv::write_row(out, {csv::real(r.times[i]), eps_ref ? csv::real((*eps_ref)[i]) : std::string(),
                         csv::real(r.eps_tot[i]), csv::real(r.eps_init[i] + r.eps_b0[i]), csv::real(r.eps_evo[i]),
                         csv::real(r.eps_bt[i]), csv::real(r.eps_b_int2[i]), csv::real(ratio[i])});
  }
}

inline void write_general_csv(std::ostream& out, const CertificateReport& r,
                              const std::optional<std::vector<double>>& eps_ref = std::nullopt) {
  if (eps_ref && eps_ref->size() != r.times.size()) throw Error(Errc::GridMismatch, "reference error grid differs");
  csv::write_header(out, kGeneralHeader);
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    csv::write_row(out, {csv::real(r.times[i]), csv::real(r.eps_init[i]), csv::real(r.eps_evo[i]),
                         csv::real(r.eps_b_int1[i]), csv::real(r.eps_b_int2[i]), csv::real(r.eps_bt[i]),
                         csv::real(r.eps_b0[i]), csv::real(r.eps_tot[i]),
                         eps_ref ? csv::real((*eps_ref)[i]) : std::string()});
  }
}

}  // namespace pinncert::certifier
