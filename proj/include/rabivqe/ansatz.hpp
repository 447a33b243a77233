#pragma once

#include <vector>

#include "rabivqe/hilbert.hpp"
#include "rabivqe/model.hpp"

namespace rabivqe {

// Variational angles for p blocks, flat layout
// [alpha_1, beta_1, gamma_1, alpha_2, ...]. Block j applies
//   exp(-i gamma_j H3) exp(-i beta_j H2) exp(-i alpha_j H1)
// to the state (the alpha factor acts first).
struct AnsatzParams {
  std::vector<double> values;

  int depth() const { return static_cast<int>(values.size()) / 3; }
  double alpha(int j) const { return values[3 * j]; }
  double beta(int j) const { return values[3 * j + 1]; }
  double gamma(int j) const { return values[3 * j + 2]; }

  static AnsatzParams zeros(int depth);
};

// Cached spectra of the three block generators. H1 and H2 are diagonal in
// the flattened basis (entries +-1 and the Fock index); H3 is diagonalized
// once and reused for every gamma rotation.
struct CompiledAnsatz {
  HilbertConfig cfg;
  Eigen::VectorXd diag_sz;  // +-1 per flattened index
  Eigen::VectorXd diag_n;   // Fock index per flattened index
  EighResult h3_eig;        // of (a + a_dag) x sigma_x
};

CompiledAnsatz compile_ansatz(const HilbertConfig& cfg,
                              const HamiltonianSet& hams);

// |0> x |down>: amplitude 1 at flattened index 1.
HybridState initial_state(const HilbertConfig& cfg);

struct AnsatzApplication {
  HybridState final_state;
  // When capture_blocks is set: state after each full block, length depth.
  std::vector<HybridState> blocks;
};

AnsatzApplication apply_ansatz(const CompiledAnsatz& ansatz,
                               const AnsatzParams& params,
                               const HybridState& psi0,
                               bool capture_blocks = false);

}  // namespace rabivqe
