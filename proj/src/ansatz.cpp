#include "rabivqe/ansatz.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rabivqe {

AnsatzParams AnsatzParams::zeros(int depth) {
  if (depth < 0) throw std::invalid_argument("depth must be non-negative");
  return AnsatzParams{std::vector<double>(3 * depth, 0.0)};
}

CompiledAnsatz compile_ansatz(const HilbertConfig& cfg,
                              const HamiltonianSet& hams) {
  const int d = cfg.hybrid_dim();
  if (hams.h3.dim() != d)
    throw std::invalid_argument("hamiltonians do not match the space");

  Eigen::VectorXd diag_sz(d), diag_n(d);
  for (int i = 0; i < d; ++i) {
    diag_sz[i] = (i % 2 == 0) ? 1.0 : -1.0;
    diag_n[i] = double(i / 2);
  }
  // The cached diagonals must agree with the assembled generators.
  for (int i = 0; i < d; ++i) {
    if (std::abs(hams.h1.entries(i, i).real() - diag_sz[i]) > 1e-14 ||
        std::abs(hams.h2.entries(i, i).real() - diag_n[i]) > 1e-14)
      throw std::invalid_argument(
          "generator diagonals do not match the basis convention");
  }

  EighResult h3_eig = eigh(hams.h3);
  const Matrix rebuilt = h3_eig.eigenvectors *
                         h3_eig.eigenvalues.cast<complexd>().asDiagonal() *
                         h3_eig.eigenvectors.adjoint();
  const double scale = hams.h3.entries.cwiseAbs().maxCoeff();
  const double resid = (rebuilt - hams.h3.entries).cwiseAbs().maxCoeff();
  if (resid > 1e-9 * scale)
    throw std::runtime_error(
        "cached eigendecomposition reconstruction error too large: " +
        std::to_string(resid));

  return CompiledAnsatz{cfg, std::move(diag_sz), std::move(diag_n),
                        std::move(h3_eig)};
}

HybridState initial_state(const HilbertConfig& cfg) {
  Vector amp = Vector::Zero(cfg.hybrid_dim());
  amp[1] = 1.0;  // |0> x |down>
  return HybridState{std::move(amp)};
}

namespace {

void apply_diag_phase(Vector& amp, const Eigen::VectorXd& diag, double angle) {
  for (int i = 0; i < amp.size(); ++i)
    amp[i] *= std::exp(complexd(0.0, -angle * diag[i]));
}

}  // namespace

AnsatzApplication apply_ansatz(const CompiledAnsatz& ansatz,
                               const AnsatzParams& params,
                               const HybridState& psi0, bool capture_blocks) {
  const int d = ansatz.cfg.hybrid_dim();
  if (psi0.dim() != d)
    throw std::invalid_argument("initial state dimension mismatch");
  if (static_cast<int>(params.values.size()) != 3 * params.depth())
    throw std::invalid_argument("parameter vector length must be 3p");

  AnsatzApplication out;
  Vector amp = psi0.amplitudes;
  Vector work(d);
  for (int j = 0; j < params.depth(); ++j) {
    apply_diag_phase(amp, ansatz.diag_sz, params.alpha(j));
    apply_diag_phase(amp, ansatz.diag_n, params.beta(j));
    // exp(-i gamma H3) through the cached eigenbasis.
    work.noalias() = ansatz.h3_eig.eigenvectors.adjoint() * amp;
    const double gamma = params.gamma(j);
    for (int k = 0; k < d; ++k)
      work[k] *= std::exp(complexd(0.0, -gamma * ansatz.h3_eig.eigenvalues[k]));
    amp.noalias() = ansatz.h3_eig.eigenvectors * work;

    const double norm = amp.norm();
    if (std::abs(norm - 1.0) > 1e-10)
      throw std::runtime_error(
          "state norm drifted to " + std::to_string(norm) + " after block " +
          std::to_string(j + 1));
    if (capture_blocks) out.blocks.push_back(HybridState{amp});
  }
  out.final_state = HybridState{std::move(amp)};
  return out;
}

}  // namespace rabivqe
