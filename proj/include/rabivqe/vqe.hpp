#pragma once

#include <cstdint>
#include <vector>

#include "rabivqe/ansatz.hpp"

namespace rabivqe {

struct OptimizerConfig {
  double gradient_step = 1e-6;    // central-difference half-width
  double convergence_tol = 1e-12; // absolute energy-change threshold
  int max_iterations = 2000;
  int restarts = 5;
  double init_scale = 0.1;        // uniform perturbation amplitude
  std::uint64_t seed = 2;
};

struct VqeRun {
  RabiParams params;
  int fock_cutoff = 0;
  int depth = 0;
  AnsatzParams best_thetas;
  double best_energy = 0.0;
  double exact_energy = 0.0;
  double fidelity = 0.0;  // vs the exact ground state
  std::vector<double> energy_history;  // accepted energies, best restart
  std::uint64_t seed = 0;
  double wall_time_s = 0.0;
  int best_restart = 0;
  int aborted_restarts = 0;
  HybridState final_state;
};

// <psi(theta)|H|psi(theta)> from psi0; throws std::runtime_error if the
// imaginary residual exceeds 1e-8.
double cost(const CompiledAnsatz& ansatz, const Operator& h,
            const AnsatzParams& params, const HybridState& psi0);

// Central finite differences, component k:
// (cost(theta + h e_k) - cost(theta - h e_k)) / (2h).
std::vector<double> gradient(const CompiledAnsatz& ansatz, const Operator& h,
                             const AnsatzParams& params,
                             const HybridState& psi0, double step);

// Quasi-Newton minimization at fixed depth with deterministic restarts.
// Restart 1 starts from warm_start (a depth-1 shorter solution) extended by a
// zero block, or from all zeros when warm_start is null; later restarts add
// uniform noise of amplitude init_scale to that starting point.
VqeRun optimize_depth(const CompiledAnsatz& ansatz, const Operator& h_full,
                      int depth, const OptimizerConfig& cfg,
                      const AnsatzParams* warm_start = nullptr);

// Warm-started chain p = 1..p_max. Best energy is non-increasing in p by
// construction.
std::vector<VqeRun> depth_sweep(const RabiParams& params, int p_max,
                                const HilbertConfig& hilbert,
                                const OptimizerConfig& cfg);

}  // namespace rabivqe
