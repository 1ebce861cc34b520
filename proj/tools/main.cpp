// codazzi: command-line front end for marches, sweeps, verification and reconstruction.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "codazzi/config.hpp"
#include "codazzi/error.hpp"
#include "codazzi/pipeline.hpp"

namespace {

struct Overrides {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string eps;
  std::string grid;
};

void add_run_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "Run configuration (YAML) or an earlier manifest.yaml")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--seed", o.seed, "Seed for randomized initial data");
  cmd->add_option("--eps", o.eps, "Comma-separated viscosity list, overrides the sweep");
  cmd->add_option("--grid", o.grid, "Grid as NsxNt (space-like cells x time-like intervals)");
}

codazzi::RunConfig load(const Overrides& o) {
  codazzi::RunConfig c = codazzi::load_config(o.config);
  if (!o.out.empty()) c.output.directory = std::filesystem::absolute(o.out).lexically_normal().string();
  if (o.seed) c.seed = *o.seed;
  if (!o.eps.empty()) {
    c.solver.epsilon_sweep = codazzi::parse_eps_list(o.eps);
    c.solver.epsilon = c.solver.epsilon_sweep.front();
    if (c.solver.epsilon_sweep.size() == 1) c.solver.epsilon_sweep.clear();
  }
  if (!o.grid.empty()) {
    const auto [ns, nt] = codazzi::parse_grid(o.grid);
    c.solver.n_space = ns;
    c.solver.n_time = nt;
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Negative-curvature isometric immersions by vanishing viscosity"};
  app.set_version_flag("--version", std::string(codazzi::version()));
  app.require_subcommand(1);

  Overrides run_o, wp_o, sweep_o;
  auto* run = app.add_subcommand("run", "March (or sweep), verify and optionally reconstruct");
  add_run_options(run, run_o);
  auto* wp = app.add_subcommand("whole-plane", "Forward and backward half-strip marches, glued");
  add_run_options(wp, wp_o);
  auto* sweep = app.add_subcommand("sweep", "Viscosity sweep with compactness diagnostics");
  add_run_options(sweep, sweep_o);

  std::string verify_dir, reconstruct_dir;
  auto* verify = app.add_subcommand("verify", "Re-run verification on an artifact directory");
  verify->add_option("--out", verify_dir, "Artifact directory of an earlier run")
      ->required()
      ->check(CLI::ExistingDirectory);
  auto* reconstruct =
      app.add_subcommand("reconstruct", "Re-run surface reconstruction on an artifact directory");
  reconstruct->add_option("--out", reconstruct_dir, "Artifact directory of an earlier run")
      ->required()
      ->check(CLI::ExistingDirectory);
  auto* list = app.add_subcommand("list-metrics", "Metric catalog with parameter schemas");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      std::cout << codazzi::list_metrics_text();
      return codazzi::kExitOk;
    }
    if (verify->parsed()) return codazzi::verify_artifacts(verify_dir, std::cerr);
    if (reconstruct->parsed()) return codazzi::reconstruct_artifacts(reconstruct_dir, std::cerr);

    codazzi::Command command = codazzi::Command::run;
    const Overrides* o = &run_o;
    if (wp->parsed()) {
      command = codazzi::Command::whole_plane;
      o = &wp_o;
    } else if (sweep->parsed()) {
      command = codazzi::Command::sweep;
      o = &sweep_o;
    }
    codazzi::RunConfig config;
    try {
      config = load(*o);
      codazzi::validate_config(config);
    } catch (const codazzi::Error& e) {
      std::cerr << "invalid configuration: " << e.what() << "\n";
      return codazzi::kExitInvalid;
    }
    return codazzi::execute(config, command, std::cerr);
  } catch (const codazzi::Error& e) {
    std::cerr << e.what() << "\n";
    return codazzi::kExitStageFailed;
  }
}
