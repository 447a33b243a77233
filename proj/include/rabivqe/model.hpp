#pragma once

#include "rabivqe/hilbert.hpp"

namespace rabivqe {

// Physical parameters of the single-mode spin-boson Hamiltonian
//   H = omega0 a_dag a + (Omega/2) sigma_z - lam (a + a_dag) sigma_x.
// The dimensionless coupling is g = 2 lam / sqrt(omega0 Omega); g = 1 is the
// critical point.
struct RabiParams {
  double omega0 = 0.1;
  double Omega = 64.0;
  double lam = 0.0;

  double g() const;

  // Validate omega0 > 0, Omega > 0, lam >= 0 (resp. g >= 0).
  static RabiParams from_lambda(double omega0, double Omega, double lam);
  static RabiParams from_g(double omega0, double Omega, double g);
};

// Assembled operators on the hybrid space (h_eff lives on the boson space).
struct HamiltonianSet {
  Operator h_full;  // omega0*h2 + (Omega/2)*h1 - lam*h3
  Operator h1;      // 1 x sigma_z
  Operator h2;      // a_dag a x 1
  Operator h3;      // (a + a_dag) x sigma_x, stored unsigned
  Operator h_eff;   // boson-only low-frequency quadratic model
  Operator parity;  // diag((-1)^n) x sigma_z
};

HamiltonianSet build_hamiltonians(const RabiParams& params,
                                  const HilbertConfig& cfg);

struct GroundState {
  double energy = 0.0;
  HybridState state;
  double gap = 0.0;     // E1 - E0
  double parity = 0.0;  // <Pi> of the returned state
};

// Exact diagonalization ground state of a hybrid-basis Hamiltonian. If the
// lowest eigenvalue is degenerate within 1e-10, returns the eigenvector with
// the larger |<Pi>|.
GroundState exact_ground_state(const Operator& h_full);

// S(x) = exp((x/2)(a_dag^2 - a^2)) on the truncated mode, built through the
// eigendecomposition of the Hermitian generator (i/2)(a_dag^2 - a^2).
// Throws std::invalid_argument for |x| > 3 (truncation quality).
Operator build_squeeze_operator(double x, const HilbertConfig& cfg);

// x(g) = -(1/4) ln(1 - g^2) for 0 <= g < 1; throws std::domain_error
// otherwise.
double critical_squeezing_x(double g);

}  // namespace rabivqe
