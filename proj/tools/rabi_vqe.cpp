#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rabivqe/experiment.hpp"

namespace {

using rabivqe::ExperimentConfig;

// Flag values staged separately so that file values are only overridden by
// flags the user actually passed.
struct Overrides {
  std::string config_path;
  std::optional<double> omega0;
  std::vector<double> omega;
  std::optional<double> g;
  std::optional<double> lambda;
  std::optional<int> cutoff;
  std::optional<int> pmax;
  std::optional<std::uint64_t> seed;
  std::optional<int> restarts;
  std::string out_dir;
  std::optional<int> jobs;
  bool capture_blocks = false;
  std::string wigner_grid;
  std::optional<int> depth;
};

void add_common_options(CLI::App* cmd, Overrides& ov) {
  cmd->add_option("--config", ov.config_path, "Configuration file (JSON)");
  cmd->add_option("--omega0", ov.omega0, "Mode frequency");
  cmd->add_option("--omega", ov.omega,
                  "Spin frequency (repeatable; replaces the configured list)");
  auto* g_opt = cmd->add_option("--g", ov.g, "Dimensionless coupling");
  auto* l_opt = cmd->add_option("--lambda", ov.lambda, "Bare coupling");
  g_opt->excludes(l_opt);
  l_opt->excludes(g_opt);
  cmd->add_option("--cutoff", ov.cutoff, "Highest retained Fock state");
  cmd->add_option("--pmax", ov.pmax, "Deepest circuit in a sweep");
  cmd->add_option("--seed", ov.seed, "Optimizer seed");
  cmd->add_option("--restarts", ov.restarts, "Optimizer restarts");
  cmd->add_option("--out", ov.out_dir, "Output directory");
  cmd->add_option("--jobs", ov.jobs, "Worker pool size (0 = hardware)");
  cmd->add_flag("--capture-blocks", ov.capture_blocks,
                "Record per-block states and export their Wigner grids");
  cmd->add_option("--wigner-grid", ov.wigner_grid,
                  "Phase-space grid \"qmin:qmax:npts\"");
}

ExperimentConfig build_config(const Overrides& ov) {
  ExperimentConfig cfg;
  if (!ov.config_path.empty())
    cfg = rabivqe::load_config_file(ov.config_path);

  if (ov.omega0) cfg.omega0 = *ov.omega0;
  if (!ov.omega.empty()) cfg.omega_list = ov.omega;
  if (ov.g) {
    cfg.g = *ov.g;
    cfg.lambda.reset();
  }
  if (ov.lambda) {
    cfg.lambda = *ov.lambda;
    cfg.g.reset();
  }
  if (ov.cutoff) cfg.fock_cutoff = *ov.cutoff;
  if (ov.pmax) cfg.p_max = *ov.pmax;
  if (ov.seed) cfg.optimizer.seed = *ov.seed;
  if (ov.restarts) cfg.optimizer.restarts = *ov.restarts;
  if (!ov.out_dir.empty()) cfg.out_dir = ov.out_dir;
  if (ov.jobs) cfg.jobs = *ov.jobs;
  if (ov.capture_blocks) cfg.capture_blocks = true;
  if (!ov.wigner_grid.empty()) cfg.wigner_grid = ov.wigner_grid;

  // Normalize through the parser so every invariant is checked once.
  return rabivqe::parse_config_text(rabivqe::serialize_config(cfg));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Critical ground-state preparation and phase-space analysis "
               "for a single-mode spin-boson model"};
  app.require_subcommand(1);

  Overrides ov;
  CLI::App* ground = app.add_subcommand(
      "ground-truth", "Exact-diagonalization reference table");
  add_common_options(ground, ov);

  CLI::App* vqe = app.add_subcommand(
      "vqe", "Optimize one circuit (warm-started up to --depth)");
  add_common_options(vqe, ov);
  vqe->add_option("--depth", ov.depth, "Circuit depth p")->required();

  CLI::App* sweep = app.add_subcommand(
      "sweep", "Depth and frequency sweep with scaling fits");
  add_common_options(sweep, ov);

  std::string state_path;
  CLI::App* wig = app.add_subcommand(
      "wigner", "Phase-space grid for a stored state file");
  add_common_options(wig, ov);
  wig->add_option("state", state_path, "final_state CSV from a vqe run")
      ->required();

  CLI::App* version = app.add_subcommand("version", "Print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (version->parsed()) {
      std::printf("%s %s\n", rabivqe::kToolName, rabivqe::kToolVersion);
      return 0;
    }
    const ExperimentConfig cfg = build_config(ov);
    if (ground->parsed()) return rabivqe::cmd_ground_truth(cfg);
    if (vqe->parsed()) {
      if (cfg.omega_list.size() != 1)
        throw rabivqe::ConfigError(
            "vqe needs exactly one --omega value (or a one-entry list)");
      return rabivqe::cmd_vqe(cfg, cfg.omega_list.front(), *ov.depth);
    }
    if (sweep->parsed()) return rabivqe::cmd_sweep(cfg);
    if (wig->parsed()) return rabivqe::cmd_wigner(cfg, state_path);
  } catch (const rabivqe::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const rabivqe::IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return 3;
  } catch (const rabivqe::NumericError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 2;
  }
  return 0;
}
