#pragma once

#include <Eigen/Dense>
#include <complex>

namespace rabivqe {

using complexd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// One truncated bosonic mode (Fock states 0..fock_cutoff) tensored with a
// single spin-1/2. Flattened hybrid basis index: 2*n + s where n is the Fock
// index and s the spin index (s = 0 for up, 1 for down); spin is the fast
// index, so |0,down> sits at index 1.
struct HilbertConfig {
  int fock_cutoff = 60;

  int boson_dim() const { return fock_cutoff + 1; }
  int hybrid_dim() const { return 2 * (fock_cutoff + 1); }

  // Validates fock_cutoff >= 1.
  static HilbertConfig with_cutoff(int fock_cutoff);
};

// Dense complex operator with an explicit hermiticity tag. The tag is only
// set by factories that verified max|A - A^dag| <= 1e-12 * max|A|.
struct Operator {
  Matrix entries;
  bool hermitian = false;

  int dim() const { return static_cast<int>(entries.rows()); }

  static Operator general(Matrix m);
  // Throws std::invalid_argument if the hermiticity check fails.
  static Operator hermitian_checked(Matrix m);
};

// Normalized state vector in the flattened hybrid basis.
struct HybridState {
  Vector amplitudes;

  int dim() const { return static_cast<int>(amplitudes.size()); }
  double norm() const { return amplitudes.norm(); }
};

// Reduced density matrix of the bosonic mode, (N+1) x (N+1).
struct BosonDensityMatrix {
  Matrix entries;

  int dim() const { return static_cast<int>(entries.rows()); }

  // Validates hermiticity (1e-12 relative), unit trace (1e-10) and
  // positive semidefiniteness (eigenvalues >= -1e-10).
  static BosonDensityMatrix validated(Matrix m);
};

// Ladder and quadrature operators on the truncated mode. The truncation is a
// hard cutoff: a_dag |N> = 0.
struct BosonOps {
  Operator a;      // annihilation, <n-1|a|n> = sqrt(n)
  Operator a_dag;  // creation
  Operator n_op;   // number operator
  Operator q;      // (a + a_dag)/sqrt(2)
  Operator p;      // -i (a - a_dag)/sqrt(2)
};

struct EighResult {
  Eigen::VectorXd eigenvalues;  // ascending
  Matrix eigenvectors;          // orthonormal columns, A = V diag(w) V^dag
};

Operator spin_sigma_x();
Operator spin_sigma_z();
Operator spin_identity();
Operator boson_identity(const HilbertConfig& cfg);

BosonOps build_boson_ops(const HilbertConfig& cfg);

// Kronecker embedding boson_op (slow index) x spin_op (fast index).
// spin_op must be 2-dimensional.
Operator tensor(const Operator& boson_op, const Operator& spin_op);

// Dense Hermitian eigendecomposition. Requires op.hermitian.
EighResult eigh(const Operator& op);

// V diag(exp(-i t w)) V^dag applied to the state.
HybridState apply_diag_exp(const HybridState& state, const Matrix& eigvecs,
                           const Eigen::VectorXd& eigvals, double t);

// Trace out the spin: rho_mn = sum_s psi(m,s) conj(psi(n,s)).
// Requires a normalized state (1e-10).
BosonDensityMatrix partial_trace_spin(const HybridState& state);

// <state| diag((-1)^n) x sigma_z |state> from the basis convention.
double parity_expectation(const HybridState& state);

}  // namespace rabivqe
