#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "pinncert/cli.hpp"

namespace cli = pinncert::cli;

int main(int argc, char** argv) {
  CLI::App app{"Residual-based error certificates for PINN heat solutions"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;
  std::string out = ".";
  bool strict = false;
  app.add_option("--seed", seed, "Seed for all randomness (overrides the config key)");
  app.add_option("--out", out, "Output directory");
  app.add_flag("--strict-bound", strict, "Report limits plus Cauchy defect and inflate quadrature panels");

  double alpha = 1.0;
  std::vector<std::uint64_t> ns = {50, 100, 200, 400, 800, 1600, 3200};
  std::size_t sweep_tail = 3;
  double sweep_tol = 1e-4;
  auto* sweep = app.add_subcommand("bounds-sweep", "Growth bounds omega_n of the discrete heat semigroups");
  sweep->add_option("--alpha", alpha, "Diffusivity")->capture_default_str();
  sweep->add_option("--n", ns, "Ascending list of interior node counts")->delimiter(',')->capture_default_str();
  sweep->add_option("--tail", sweep_tail, "Entries used for the Cauchy defect")->capture_default_str();
  sweep->add_option("--tol", sweep_tol, "Convergence tolerance on the defect")->capture_default_str();

  std::string config_path;
  auto* train = app.add_subcommand("train", "Train the default PINN and write checkpoint and loss history");
  train->add_option("--config", config_path, "Run configuration")->required();

  std::string checkpoint_path;
  std::optional<std::string> constants_path;
  auto* certify = app.add_subcommand("certify", "Certificate contributions for a trained checkpoint");
  certify->add_option("--checkpoint", checkpoint_path, "Checkpoint written by train")->required();
  certify->add_option("--config", config_path, "Run configuration")->required();
  certify->add_option("--constants", constants_path, "File with M, omega, normD0, normAD0 (default: heat constants)");

  cli::MeshNormsOptions mesh_opts;
  auto* mesh = app.add_subcommand("mesh-norms", "Norms of the boundary right inverse along mesh refinements");
  mesh->add_option("--mesh", mesh_opts.meshes, "Mesh files, coarse to fine")->required();
  mesh->add_option("--matrix", mesh_opts.matrices, "One system matrix file per mesh");
  mesh->add_option("--mu-e", mesh_opts.mu_e, "Embedding norm factor")->capture_default_str();
  mesh->add_option("--tail", mesh_opts.tail, "Entries used for the Cauchy defect")->capture_default_str();
  mesh->add_option("--tol", mesh_opts.tol, "Convergence tolerance on the defect")->capture_default_str();
  mesh->add_flag("--printed-formula", mesh_opts.printed_formula, "Use the printed Neumann coefficients");

  auto* reference = app.add_subcommand("reference", "Reference solution samples t,x,u");
  reference->add_option("--config", config_path, "Run configuration")->required();

  for (auto* sub : {sweep, train, certify, mesh, reference}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const cli::Globals g{seed, out, strict};
  const cli::Console con{std::cout, std::cerr};
  try {
    if (*sweep) cli::cmd_bounds_sweep(alpha, ns, sweep_tail, sweep_tol, g, con);
    if (*train) cli::cmd_train(config_path, g, con);
    if (*certify) cli::cmd_certify(checkpoint_path, config_path, constants_path, g, con);
    if (*mesh) cli::cmd_mesh_norms(mesh_opts, g, con);
    if (*reference) cli::cmd_reference(config_path, g, con);
  } catch (const pinncert::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
