#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rabivqe/analysis.hpp"

namespace rabivqe {

// Error categories mapped to process exit codes by the CLI driver:
// config -> 1, numerical -> 2, I/O -> 3.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kToolName = "rabi-vqe";
inline constexpr const char* kToolVersion = "0.1.0";

// Full experiment description. Exactly one of g / lambda may be set; when
// neither is, g defaults to 1. Serialized as a single JSON document with a
// nested "optimizer" section.
struct ExperimentConfig {
  double omega0 = 0.1;
  std::vector<double> omega_list = {4.0, 8.0, 16.0, 32.0, 64.0};
  std::optional<double> g;
  std::optional<double> lambda;
  int fock_cutoff = 60;
  int p_max = 12;
  OptimizerConfig optimizer;
  std::string out_dir;  // empty -> RABI_VQE_OUT env or "out"
  int jobs = 0;         // 0 -> hardware parallelism
  bool capture_blocks = false;
  std::string wigner_grid = "-8:8:201";  // "qmin:qmax:npts", both axes
};

// Parsing and serialization; round-trip parse(serialize(c)) == c.
ExperimentConfig parse_config_text(const std::string& text);
std::string serialize_config(const ExperimentConfig& cfg);
ExperimentConfig load_config_file(const std::string& path);

// FNV-1a over the canonical serialized form.
std::uint64_t config_hash(const ExperimentConfig& cfg);

// Effective coupling for a given Omega (resolves the g/lambda alternative).
RabiParams resolve_params(const ExperimentConfig& cfg, double Omega);

// Output directory resolution: cfg.out_dir if set, else RABI_VQE_OUT env,
// else "out". Created if missing.
std::string resolve_out_dir(const ExperimentConfig& cfg);

struct WignerGridSpec {
  double lo = -8.0;
  double hi = 8.0;
  int npts = 201;
};
WignerGridSpec parse_wigner_grid(const std::string& text);

// Exact-diagonalization reference table over omega_list.
int cmd_ground_truth(const ExperimentConfig& cfg);

// Warm-started chain up to `depth` for a single Omega; writes the run JSON,
// the block trace and the final state, plus optional per-block Wigner grids.
int cmd_vqe(const ExperimentConfig& cfg, double Omega, int depth);

// Full sweep over omega_list and p = 1..p_max: fidelity-vs-depth table,
// quadrature scaling table and power-law fit summary.
int cmd_sweep(const ExperimentConfig& cfg);

// Standalone Wigner grid export for a stored state file (index,n,s,re,im).
int cmd_wigner(const ExperimentConfig& cfg, const std::string& state_path);

}  // namespace rabivqe
