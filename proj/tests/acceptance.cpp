// Acceptance suite: one PASS/FAIL line per criterion. Optional arguments select criteria by number.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "autodiff_checks.hpp"
#include "manufactured.hpp"
#include "mesh_fixtures.hpp"
#include "pinncert/bounds.hpp"
#include "pinncert/certifier.hpp"
#include "pinncert/cli.hpp"
#include "pinncert/heat1d.hpp"
#include "pinncert/linalg.hpp"
#include "pinncert/meshboundary.hpp"
#include "pinncert/pinn.hpp"
#include "test_helpers.hpp"

using namespace pinncert;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

fs::path scratch(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("pinncert_acceptance_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::ostringstream sink;
const cli::Console kQuiet{sink, sink};

// ---------------------------------------------------------------------------

Verdict growth_bound_limit() {
  const auto dir = scratch("bounds");
  std::vector<std::uint64_t> ns;
  for (std::uint64_t n = 50; n <= 3200; n *= 2) ns.push_back(n);
  const auto t0 = std::chrono::steady_clock::now();
  const auto s = cli::cmd_bounds_sweep(1.0, ns, 3, 1e-4, {std::nullopt, dir, false}, kQuiet);
  const double runtime = seconds_since(t0);
  fs::remove_all(dir);

  bool monotone = true;
  for (std::size_t i = 1; i < s.omega.size(); ++i) monotone = monotone && s.omega[i] < s.omega[i - 1];
  const double gap = std::abs(s.omega.back() - (-9.8696));

  double worst_rel = 0.0;
  for (std::size_t n : {1u, 2u, 5u, 16u, 50u, 101u, 200u}) {
    const auto e = eig_symmetric(heat1d::assemble(n, 1.0).A);
    auto lam = heat1d::closed_form_eigenvalues(n, 1.0);
    std::sort(lam.begin(), lam.end());
    for (std::size_t j = 0; j < n; ++j)
      worst_rel = std::max(worst_rel, std::abs(e.eigenvalues[j] - lam[j]) / std::abs(lam[j]));
    worst_rel = std::max(worst_rel, std::abs(heat1d::omega_n(n, 1.0) - e.eigenvalues[n - 1]) / std::abs(e.eigenvalues[n - 1]));
  }
  return {monotone && gap <= 1e-4 && runtime < 10.0 && worst_rel <= 1e-10,
          "monotone=" + std::string(monotone ? "yes" : "no") + " |omega_3200 + 9.8696|=" + fmt(gap) +
              " runtime=" + fmt(runtime) + "s closed-form vs Jacobi rel=" + fmt(worst_rel)};
}

Verdict semigroup_bound_validity() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto grid = bounds::log_spaced(1e-3, 10.0, 100);
  std::mt19937_64 rng(2718);
  std::size_t violations = 0, checked = 0;
  double worst = 0.0;
  auto check = [&](const DenseMatrix& a, const bounds::GrowthBound& gb) {
    try {
      const auto rep = bounds::verify_growth_bound(a, gb, grid);
      worst = std::max(worst, rep.worst_ratio);
      checked += rep.checked;
    } catch (const Error& e) {
      if (e.code() != Errc::ViolationFound) throw;
      ++violations;
    }
  };
  for (int i = 0; i < 50; ++i) {
    const std::size_t n = 2 + static_cast<std::size_t>(i % 7);
    const auto s = testing_helpers::random_symmetric(n, rng);
    check(s, bounds::growth_bound(s, bounds::Strategy::symmetric));
  }
  for (int i = 0; i < 50; ++i) {
    const std::size_t n = 2 + static_cast<std::size_t>(i % 7);
    const auto a = testing_helpers::random_matrix(n, n, rng);
    check(a, bounds::growth_bound(a, bounds::Strategy::log_norm));
  }
  const std::vector<std::vector<std::size_t>> shapes = {{2}, {3}, {4}, {2, 1}, {3, 1}, {2, 2}, {3, 2}, {4, 1}, {3, 2, 1}, {5}};
  for (const auto& blocks : shapes) {
    const auto j = testing_helpers::jordan_matrix(blocks, rng);
    check(j, bounds::growth_bound(j, bounds::Strategy::schur_defective, 0.1));
  }
  const double runtime = seconds_since(t0);
  return {violations == 0 && checked == 110 * grid.size() && runtime < 60.0,
          "violations=" + std::to_string(violations) + " checks=" + std::to_string(checked) +
              " worst ||e^{At}||/(M e^{wt})=" + fmt(worst) + " runtime=" + fmt(runtime) + "s"};
}

Verdict trotter_kato() {
  const auto exact = heat1d::analytic_sine_solution(0.2, {1.0});
  auto x0 = [](double x) { return std::sin(std::numbers::pi * x); };
  bool ok = true;
  std::string ratios, projected;
  for (std::size_t n : {32u, 64u, 128u}) {
    const double r = heat1d::discrete_semigroup_l2_error(2 * n, 0.2, 0.1, x0, exact) /
                     heat1d::discrete_semigroup_l2_error(n, 0.2, 0.1, x0, exact);
    const double p = heat1d::discrete_semigroup_projected_error(2 * n, 0.2, 0.1, x0, exact) /
                     heat1d::discrete_semigroup_projected_error(n, 0.2, 0.1, x0, exact);
    ok = ok && r <= 0.3;
    ratios += (ratios.empty() ? "" : ",") + fmt(r);
    projected += (projected.empty() ? "" : ",") + fmt(p);
  }
  return {ok, "e_2n/e_n=" + ratios + " (limit 0.3); diagnostic projected Z_n ratios=" + projected};
}

Verdict manufactured_dominance() {
  const double alpha = 0.2;
  const auto tr = manufactured::trace(alpha, 0.5, 201);
  std::vector<double> ref;
  for (double t : tr.times) ref.push_back(manufactured::mild_error(alpha, t));
  bool ok = true;
  std::string margins;
  for (auto kind : {heat1d::UNorm::euclidean, heat1d::UNorm::max, heat1d::UNorm::one}) {
    const auto norms = heat1d::lift_norms(kind);
    const auto r = certifier::certify(
        tr, {1.0, -alpha * std::numbers::pi * std::numbers::pi, norms.normD0, 0.0});
    const auto d = certifier::compare_to_reference(r, ref);
    ok = ok && d.dominated && d.min_margin >= 0.0;
    margins += (margins.empty() ? "" : ",") + fmt(d.min_margin);
  }
  return {ok, "points=" + std::to_string(tr.times.size()) + " min margin (euclidean,max,one)=" + margins};
}

Verdict end_to_end_pinn() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto problem = heat1d::default_problem();
  const pinn::LossWeights w;
  pinn::TrainConfig cfg;
  cfg.seed = cli::kDefaultSeed + 1;
  const auto trained = pinn::train(pinn::MlpModel::default_architecture(cli::kDefaultSeed), problem, w, cfg);
  const double train_time = seconds_since(t0);

  const auto trace = pinn::extract_trace(trained.model, problem);
  const auto norms = heat1d::lift_norms(heat1d::UNorm::euclidean);
  const auto report = certifier::certify(trace, {1.0, heat1d::omega_limit(problem.alpha), norms.normD0, norms.normAD0});
  const auto exact = heat1d::reference_solution(problem, heat1d::AnalyticSine{{1.0}});
  const auto eps_ref = pinn::reference_error(trained.model, exact, report.times);
  const auto dom = certifier::compare_to_reference(report, eps_ref);

  bool finite = true;
  for (const auto* series : {&report.eps_init, &report.eps_b0, &report.eps_bt, &report.eps_b_int1, &report.eps_b_int2,
                             &report.eps_evo, &report.eps_tot})
    for (double v : *series) finite = finite && std::isfinite(v) && v >= 0.0;
  bool everywhere = true;
  for (std::size_t i = 0; i < eps_ref.size(); ++i) everywhere = everywhere && report.eps_tot[i] >= eps_ref[i];
  const double runtime = seconds_since(t0);
  return {dom.dominated && everywhere && finite && runtime < 600.0,
          "epochs=" + std::to_string(cfg.epochs) + " final loss=" + fmt(trained.history.back().total) +
              " min margin=" + fmt(dom.min_margin) + " eps_tot(0.5)=" + fmt(report.eps_tot.back()) +
              " eps_ref(0.5)=" + fmt(eps_ref.back()) + " contributions finite/nonneg=" + (finite ? "yes" : "no") +
              " train=" + fmt(train_time) + "s"};
}

Verdict autodiff_correctness() {
  autodiff_checks::Result worst;
  std::size_t params = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto r = autodiff_checks::check_configuration(seed);
    worst.first = std::max(worst.first, r.first);
    worst.second = std::max(worst.second, r.second);
    worst.param = std::max(worst.param, r.param);
    params += r.params_checked;
  }
  return {worst.first <= 1e-6 && worst.second <= 1e-4 && worst.param <= 1e-5 && params == 100 * 100,
          "configs=100 worst rel first=" + fmt(worst.first) + " (1e-6) second=" + fmt(worst.second) +
              " (1e-4) params=" + fmt(worst.param) + " (1e-5) over " + std::to_string(params) + " parameters"};
}

Verdict boundary_exactness() {
  std::mt19937_64 rng(777);
  std::normal_distribution<double> coef(0.0, 1.0);
  double worst_neumann = 0.0, worst_inverse = 0.0;
  std::string sizes;
  for (std::size_t k : {1u, 4u, 16u}) {
    auto m = mesh_fixtures::square_mesh(k);
    mesh_fixtures::randomize_bottom(m, rng);
    sizes += (sizes.empty() ? "" : ",") + std::to_string(m.triangles.size());
    const auto maps = mesh::classify_and_map(m);
    const auto d = mesh::assemble_neumann(m, maps);
    for (int draw = 0; draw < 100; ++draw) {
      const double a = coef(rng), b = coef(rng), c = coef(rng);
      Vector u(m.num_vertices());
      for (std::size_t v = 0; v < m.num_vertices(); ++v) u[v] = a + b * m.vertices[v][0] + c * m.vertices[v][1];
      const Vector du = d * u;
      for (std::size_t i = 0; i < d.rows(); ++i) {
        const auto& n = maps.unit_normals[i];
        worst_neumann = std::max(worst_neumann, std::abs(du[i] - (b * n[0] + c * n[1])));
      }
    }
    const auto s = mesh::stack_and_invert(mesh::assemble_dirichlet(m, maps), d);
    worst_inverse = std::max(worst_inverse, (s.D * s.D0 - DenseMatrix::identity(s.D.rows())).max_abs());
  }
  return {worst_neumann <= 1e-12 && worst_inverse <= 1e-9 && sizes == "2,32,512",
          "triangles=" + sizes + " fields=100 max |Neumann - n.grad|=" + fmt(worst_neumann) +
              " max |D D0 - I|=" + fmt(worst_inverse)};
}

Verdict synthetic_mesh_sweep() {
  const auto dir = scratch("mesh");
  cli::MeshNormsOptions o;
  o.tol = 1e-2;
  std::vector<mesh::TriMesh> meshes;
  std::vector<DenseMatrix> A;
  for (std::size_t k : {4u, 8u, 16u, 32u}) {
    meshes.push_back(mesh_fixtures::square_mesh(k, mesh_fixtures::Side::left, {1.0, 0.0}));
    A.push_back(mesh_fixtures::grid_stencil(k));
    const auto mp = dir / ("square" + std::to_string(k) + ".mesh");
    const auto ap = dir / ("stencil" + std::to_string(k) + ".txt");
    std::ofstream mf(mp), af(ap);
    mesh::write_mesh(mf, meshes.back());
    write_matrix(af, A.back());
    o.meshes.push_back(mp.string());
    o.matrices.push_back(ap.string());
  }
  const auto s = cli::cmd_mesh_norms(o, {std::nullopt, dir, false}, kQuiet);
  const bool wrote = fs::exists(dir / cli::kMeshNormsCsv);
  fs::remove_all(dir);

  bool shrinking = true;
  std::string steps;
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < s.rows.size(); ++i) {
    const double step = std::abs(*s.rows[i].norm_AD0 - *s.rows[i - 1].norm_AD0);
    shrinking = shrinking && step < prev;
    steps += (steps.empty() ? "" : ",") + fmt(step);
    prev = step;
  }
  double worst_oracle = 0.0;
  for (std::size_t k = 0; k < meshes.size(); ++k) {
    const auto d0 = mesh::boundary_operator(meshes[k]).D0;
    const double o_d0 = testing_helpers::svd_max_singular_value(d0);
    const double o_ad0 = testing_helpers::svd_max_singular_value(A[k] * d0);
    worst_oracle = std::max({worst_oracle, std::abs(s.rows[k].norm_D0 - o_d0) / o_d0,
                             std::abs(*s.rows[k].norm_AD0 - o_ad0) / o_ad0});
  }
  const bool converged = s.limit_D0 && s.limit_AD0 && s.limit_D0->converged && s.limit_AD0->converged;
  return {wrote && shrinking && converged && worst_oracle <= 1e-9,
          "||AD0|| increments=" + steps + " limit ||D0||=" + fmt(s.limit_D0->value) + " limit ||AD0||=" +
              fmt(s.limit_AD0->value) + " (defect " + fmt(s.limit_AD0->cauchy_defect) + ") SVD oracle rel=" +
              fmt(worst_oracle)};
}

Verdict quadrature_order() {
  bool ok = true;
  std::string worst;
  for (double w : {-10.0, -1.0, 0.0}) {
    const double exact = w == 0.0 ? 1.0 : std::expm1(w) / w;
    double prev = 0.0, min_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t steps = 16; steps <= 512; steps *= 2) {
      std::vector<double> t(steps + 1);
      for (std::size_t i = 0; i <= steps; ++i) t[i] = static_cast<double>(i) / static_cast<double>(steps);
      t.back() = 1.0;
      const std::vector<double> v(steps + 1, 1.0);
      const double err = std::abs(certifier::exp_kernel_integral(t, v, w, steps) - exact);
      if (steps > 16 && !(prev <= 1e-14 && err <= 1e-14)) {
        const double ratio = prev / err;
        min_ratio = std::min(min_ratio, ratio);
        ok = ok && ratio >= 3.5;
      }
      prev = err;
    }
    worst += (worst.empty() ? "" : " ") + ("w=" + fmt(w) + ":") +
             (std::isinf(min_ratio) ? std::string("exact") : "min ratio " + fmt(min_ratio));
  }
  return {ok, worst};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "growth-bound limit", growth_bound_limit},
      {2, "semigroup bound validity", semigroup_bound_validity},
      {3, "Trotter-Kato surrogate", trotter_kato},
      {4, "manufactured-solution dominance", manufactured_dominance},
      {5, "end-to-end PINN certification", end_to_end_pinn},
      {6, "autodiff correctness", autodiff_correctness},
      {7, "boundary-operator exactness", boundary_exactness},
      {8, "synthetic mesh-norm sweep", synthetic_mesh_sweep},
      {9, "quadrature order", quadrature_order},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : all) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += v.pass ? 0 : 1;
    std::cout << (v.pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << ": " << v.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
