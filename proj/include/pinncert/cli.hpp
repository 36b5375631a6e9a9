#pragma once

// Subcommand bodies of the pinncert driver. Argument parsing lives in tools/.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pinncert/bounds.hpp"
#include "pinncert/certifier.hpp"
#include "pinncert/config.hpp"
#include "pinncert/csv.hpp"
#include "pinncert/error.hpp"
#include "pinncert/heat1d.hpp"
#include "pinncert/linalg.hpp"
#include "pinncert/meshboundary.hpp"
#include "pinncert/pinn.hpp"

namespace pinncert::cli {

inline constexpr const char* kBoundsSweepCsv = "bounds_sweep.csv";
inline constexpr const char* kCheckpointFile = "checkpoint.txt";
inline constexpr const char* kLossCsv = "loss.csv";
inline constexpr const char* kCertificateCsv = "certificate.csv";
inline constexpr const char* kMeshNormsCsv = "mesh_norms.csv";
inline constexpr const char* kReferenceCsv = "reference.csv";

inline constexpr std::uint64_t kDefaultSeed = 42;

struct Globals {
  std::optional<std::uint64_t> seed;  // overrides the config key
  std::filesystem::path out = ".";
  bool strict_bound = false;
};

struct Console {
  std::ostream& out;
  std::ostream& err;
};

/// 1 for numerical failures at run time, 2 for bad configuration or input.
inline int exit_code(Errc e) {
  switch (e) {
    case Errc::NoConvergence:
    case Errc::NonFinite:
    case Errc::QuadratureFailure:
    case Errc::SchurFailure:
    case Errc::DivergedLoss:
    case Errc::ViolationFound: return 1;
    default: return 2;
  }
}

inline std::ofstream open_output(const Globals& g, const char* name) {
  std::error_code ec;
  std::filesystem::create_directories(g.out, ec);
  if (ec) throw Error(Errc::Io, "cannot create " + g.out.string() + ": " + ec.message());
  const auto path = g.out / name;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::Io, "cannot write " + path.string());
  return f;
}

inline void finish(std::ofstream& f, const Globals& g, const char* name) {
  f.close();
  if (!f) throw Error(Errc::Io, "write failed: " + (g.out / name).string());
}

inline std::uint64_t seed_from(const config::Config& c, const Globals& g) {
  return g.seed ? *g.seed : c.count("seed", kDefaultSeed);
}

// ---------------------------------------------------------------------------
// Heat problem keys: alpha, t_end, initial_sine (coefficients of sin(k pi x)); zero boundary data.

struct HeatSetup {
  heat1d::HeatProblem problem;
  std::vector<double> sine_coeffs;
};

inline HeatSetup heat_setup(const config::Config& c) {
  HeatSetup s;
  s.problem.alpha = c.real("alpha");
  s.problem.t_end = c.real("t_end");
  s.sine_coeffs = c.reals("initial_sine");
  s.problem.initial = [coeffs = s.sine_coeffs](double x) {
    double v = 0.0;
    for (std::size_t k = 1; k <= coeffs.size(); ++k) v += coeffs[k - 1] * std::sin(static_cast<double>(k) * std::numbers::pi * x);
    return v;
  };
  s.problem.boundary = heat1d::homogeneous_boundary();
  s.problem.validate();
  return s;
}

/// reference = analytic | crank_nicolson | none.
inline std::optional<heat1d::SpaceTimeField> reference_from(const config::Config& c, const HeatSetup& s) {
  const auto mode = c.text("reference", "analytic");
  if (mode == "none") return std::nullopt;
  if (mode == "analytic") return heat1d::reference_solution(s.problem, heat1d::AnalyticSine{s.sine_coeffs});
  if (mode == "crank_nicolson") {
    heat1d::CrankNicolson cn;
    cn.n_ref = c.count("cn_n_ref", cn.n_ref);
    cn.dt = c.real("cn_dt", cn.dt);
    return heat1d::reference_solution(s.problem, cn);
  }
  throw Error(Errc::InvalidConfig, c.source() + ": key 'reference': unknown mode '" + mode + "'");
}

inline heat1d::UNorm u_norm_from(const config::Config& c) {
  const auto name = c.text("u_norm", "euclidean");
  if (name == "euclidean") return heat1d::UNorm::euclidean;
  if (name == "max") return heat1d::UNorm::max;
  if (name == "one") return heat1d::UNorm::one;
  throw Error(Errc::InvalidConfig, c.source() + ": key 'u_norm': unknown norm '" + name + "'");
}

// ---------------------------------------------------------------------------
// bounds-sweep

struct BoundsSweep {
  std::vector<std::uint64_t> n;
  std::vector<double> omega;
  bounds::LimitEstimate limit;
};

inline BoundsSweep bounds_sweep(double alpha, const std::vector<std::uint64_t>& ns, std::size_t tail, double tol) {
  if (ns.empty()) throw Error(Errc::InvalidConfig, "n list is empty");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error(Errc::InvalidConfig, "alpha must be > 0");
  BoundsSweep s;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (ns[i] == 0) throw Error(Errc::InvalidConfig, "n must be >= 1");
    if (i > 0 && ns[i] <= ns[i - 1]) throw Error(Errc::InvalidConfig, "n list must be strictly ascending");
    s.n.push_back(ns[i]);
    s.omega.push_back(heat1d::omega_n(ns[i], alpha));
  }
  if (ns.size() >= 2) {
    s.limit = bounds::scalar_limit(s.omega, std::clamp<std::size_t>(tail, 2, ns.size()), tol);
  } else {
    s.limit = {s.omega.back(), 0.0, tol, true};
  }
  return s;
}

inline void write_bounds_sweep_csv(std::ostream& out, const BoundsSweep& s, bool strict) {
  csv::write_header(out, "n,omega");
  for (std::size_t i = 0; i < s.n.size(); ++i) csv::write_row(out, {std::to_string(s.n[i]), csv::real(s.omega[i])});
  out << "# omega_star " << csv::real(s.limit.value) << " defect " << csv::real(s.limit.cauchy_defect) << " bound "
      << csv::real(s.limit.bound(strict)) << " converged " << (s.limit.converged ? "true" : "false") << '\n';
}

inline BoundsSweep cmd_bounds_sweep(double alpha, const std::vector<std::uint64_t>& ns, std::size_t tail, double tol,
                                    const Globals& g, Console con) {
  const auto s = bounds_sweep(alpha, ns, tail, tol);
  auto f = open_output(g, kBoundsSweepCsv);
  write_bounds_sweep_csv(f, s, g.strict_bound);
  finish(f, g, kBoundsSweepCsv);
  con.out << "omega_star " << csv::real(s.limit.bound(g.strict_bound)) << " (defect " << csv::real(s.limit.cauchy_defect)
          << ")\n";
  return s;
}

// ---------------------------------------------------------------------------
// train

struct TrainSetup {
  HeatSetup heat;
  pinn::LossWeights weights;
  pinn::TrainConfig train;
  std::uint64_t seed = kDefaultSeed;
};

/// Model initialised from `seed`, collocation drawn from `seed + 1`.
inline TrainSetup train_setup(const config::Config& c, const Globals& g) {
  TrainSetup s;
  s.heat = heat_setup(c);
  s.seed = seed_from(c, g);
  auto& w = s.weights;
  w.a_evo = c.real("a_evo", w.a_evo);
  w.a_init = c.real("a_init", w.a_init);
  w.a_bc1 = c.real("a_bc1", w.a_bc1);
  w.a_bc2 = c.real("a_bc2", w.a_bc2);
  w.N_evo = c.count("n_evo", w.N_evo);
  w.N_init = c.count("n_init", w.N_init);
  w.N_bc = c.count("n_bc", w.N_bc);
  w.validate();
  s.train.epochs = c.count("epochs");
  s.train.adam.lr = c.real("lr", s.train.adam.lr);
  if (!(s.train.adam.lr > 0.0)) throw Error(Errc::InvalidConfig, c.source() + ": key 'lr' must be > 0");
  s.train.seed = s.seed + 1;
  return s;
}

inline pinn::TrainResult cmd_train(const std::string& config_path, const Globals& g, Console con) {
  const auto c = config::Config::load(config_path);
  const auto s = train_setup(c, g);
  auto r = pinn::train(pinn::MlpModel::default_architecture(s.seed), s.heat.problem, s.weights, s.train);
  {
    auto f = open_output(g, kCheckpointFile);
    pinn::write_checkpoint(f, r.model);
    finish(f, g, kCheckpointFile);
  }
  {
    auto f = open_output(g, kLossCsv);
    pinn::write_loss_csv(f, r.history);
    finish(f, g, kLossCsv);
  }
  con.out << "epochs " << s.train.epochs << " final loss " << csv::real(r.history.back().total) << '\n';
  return r;
}

// ---------------------------------------------------------------------------
// certify

/// Heat defaults: M = 1, omega = -alpha pi^2, normD0 from the configured U-norm, normAD0 = 0.
/// A constants file replaces all four with its required keys M, omega, normD0, normAD0.
inline certifier::CertificateConfig certificate_constants(const HeatSetup& h, heat1d::UNorm norm,
                                                          const std::optional<std::string>& constants_path) {
  certifier::CertificateConfig cc;
  if (constants_path) {
    const auto k = config::Config::load(*constants_path);
    cc.M = k.real("M");
    cc.omega = k.real("omega");
    cc.normD0 = k.real("normD0");
    cc.normAD0 = k.real("normAD0");
    try {
      cc.validate();
    } catch (const Error& e) {
      throw Error(e.code(), *constants_path + ": " + e.message());
    }
  } else {
    const auto lift = heat1d::lift_norms(norm);
    cc.M = 1.0;
    cc.omega = heat1d::omega_limit(h.problem.alpha);
    cc.normD0 = lift.normD0;
    cc.normAD0 = lift.normAD0;
  }
  return cc;
}

struct CertifyResult {
  certifier::CertificateReport report;
  std::optional<std::vector<double>> eps_ref;
  std::optional<certifier::DominanceReport> dominance;
};

inline CertifyResult certify_model(const pinn::MlpModel& m, const config::Config& c,
                                   const std::optional<std::string>& constants_path, bool strict) {
  const auto h = heat_setup(c);
  pinn::TraceGrid grid;
  grid.n_t = c.count("trace_n_t", grid.n_t);
  grid.n_x = c.count("trace_n_x", grid.n_x);
  grid.u_norm = u_norm_from(c);
  auto cc = certificate_constants(h, grid.u_norm, constants_path);
  if (c.flag("compat_normD0", false)) cc.normD0 = heat1d::kCompatNormD0;
  cc.split_initial = c.flag("split_initial", false);
  if (strict) cc.curvature_cap = c.real("curvature_cap");
  cc.validate();

  const auto exact = reference_from(c, h);
  const auto trace = pinn::extract_trace(m, h.problem, grid);
  CertifyResult r;
  r.report = certifier::certify(trace, cc);
  if (exact) {
    r.eps_ref = pinn::reference_error(m, *exact, r.report.times);
    r.dominance = certifier::compare_to_reference(r.report, *r.eps_ref);
  }
  return r;
}

inline CertifyResult cmd_certify(const std::string& checkpoint_path, const std::string& config_path,
                                 const std::optional<std::string>& constants_path, const Globals& g, Console con) {
  const auto c = config::Config::load(config_path);
  const auto m = pinn::load_checkpoint(checkpoint_path);
  auto r = certify_model(m, c, constants_path, g.strict_bound);
  const auto schema = c.text("schema", "heat");
  if (schema != "heat" && schema != "general")
    throw Error(Errc::InvalidConfig, c.source() + ": key 'schema': unknown schema '" + schema + "'");

  const double t_end = r.report.times.back();
  if (r.report.max_dt > t_end / 200.0 * (1.0 + 1e-12))
    con.err << "warning: max time step " << csv::real(r.report.max_dt) << " exceeds t_end/200; residual sampling may be too coarse\n";
  auto f = open_output(g, kCertificateCsv);
  if (schema == "heat")
    certifier::write_heat_csv(f, r.report, r.eps_ref);
  else
    certifier::write_general_csv(f, r.report, r.eps_ref);
  finish(f, g, kCertificateCsv);

  con.out << "eps_tot(t_end) " << csv::real(r.report.eps_tot.back()) << '\n';
  if (r.dominance) {
    con.out << "min margin " << csv::real(r.dominance->min_margin) << '\n';
    con.out << "dominated: " << (r.dominance->dominated ? "true" : "false") << '\n';
  } else {
    con.out << "dominated: n/a (no reference)\n";
  }
  return r;
}

// ---------------------------------------------------------------------------
// mesh-norms

struct MeshNormsOptions {
  std::vector<std::string> meshes;
  std::vector<std::string> matrices;  // empty or one per mesh
  double mu_e = 1.0;
  std::size_t tail = 3;
  double tol = 1e-3;
  bool printed_formula = false;
};

inline mesh::NormSweep cmd_mesh_norms(const MeshNormsOptions& o, const Globals& g, Console con) {
  if (o.meshes.empty()) throw Error(Errc::InvalidConfig, "no mesh files given");
  if (!o.matrices.empty() && o.matrices.size() != o.meshes.size())
    throw Error(Errc::InvalidConfig, "need one matrix file per mesh file");
  if (!(o.mu_e > 0.0)) throw Error(Errc::InvalidConfig, "mu_e must be > 0");
  std::vector<mesh::TriMesh> meshes;
  for (const auto& p : o.meshes) meshes.push_back(mesh::read_mesh_file(p));
  std::vector<DenseMatrix> mats;
  for (const auto& p : o.matrices) mats.push_back(read_matrix_file(p));
  const auto s = mesh::norm_sweep(meshes, mats, o.mu_e, o.tail, o.tol, o.printed_formula, o.meshes);
  auto f = open_output(g, kMeshNormsCsv);
  mesh::write_norm_sweep_csv(f, s, g.strict_bound);
  finish(f, g, kMeshNormsCsv);
  if (s.limit_D0) con.out << "norm_D0 limit " << csv::real(s.limit_D0->bound(g.strict_bound)) << '\n';
  if (s.limit_AD0) con.out << "norm_AD0 limit " << csv::real(s.limit_AD0->bound(g.strict_bound)) << '\n';
  return s;
}

// ---------------------------------------------------------------------------
// reference

/// CSV t,x,u on ref_n_t times over [0, t_end] and ref_n_x points over [0, 1], boundaries included.
inline void cmd_reference(const std::string& config_path, const Globals& g, Console con) {
  const auto c = config::Config::load(config_path);
  const auto h = heat_setup(c);
  const auto exact = reference_from(c, h);
  if (!exact) throw Error(Errc::InvalidConfig, c.source() + ": reference subcommand needs a reference mode");
  const auto nt = c.count("ref_n_t", 51), nx = c.count("ref_n_x", 101);
  if (nt < 2 || nx < 2) throw Error(Errc::InvalidConfig, c.source() + ": ref_n_t and ref_n_x must be >= 2");
  const auto times = pinn::trace_times(h.problem.t_end, nt);
  auto f = open_output(g, kReferenceCsv);
  csv::write_header(f, "t,x,u");
  for (double t : times)
    for (std::uint64_t j = 0; j < nx; ++j) {
      const double x = static_cast<double>(j) / static_cast<double>(nx - 1);
      csv::write_row(f, {csv::real(t), csv::real(x), csv::real((*exact)(t, x))});
    }
  finish(f, g, kReferenceCsv);
  con.out << "wrote " << nt * nx << " rows\n";
}

}  // namespace pinncert::cli
