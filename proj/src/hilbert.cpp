#include "rabivqe/hilbert.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rabivqe {

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

HilbertConfig HilbertConfig::with_cutoff(int fock_cutoff) {
  if (fock_cutoff < 1)
    throw std::invalid_argument("fock_cutoff must be at least 1, got " +
                                std::to_string(fock_cutoff));
  return HilbertConfig{fock_cutoff};
}

Operator Operator::general(Matrix m) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("operator matrix must be square");
  return Operator{std::move(m), false};
}

Operator Operator::hermitian_checked(Matrix m) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("operator matrix must be square");
  const double scale = max_abs(m);
  const double dev = max_abs(m - m.adjoint().eval());
  if (dev > 1e-12 * scale)
    throw std::invalid_argument(
        "matrix fails the hermiticity check: max|A - A^dag| = " +
        std::to_string(dev));
  return Operator{std::move(m), true};
}

BosonDensityMatrix BosonDensityMatrix::validated(Matrix m) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("density matrix must be square");
  const double scale = std::max(1.0, max_abs(m));
  if (max_abs(m - m.adjoint().eval()) > 1e-12 * scale)
    throw std::invalid_argument("density matrix is not hermitian");
  const complexd tr = m.trace();
  if (std::abs(tr - complexd(1.0, 0.0)) > 1e-10)
    throw std::invalid_argument("density matrix trace differs from 1 by " +
                                std::to_string(std::abs(tr - 1.0)));
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m,
                                               Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("density matrix eigendecomposition failed");
  if (solver.eigenvalues().minCoeff() < -1e-10)
    throw std::invalid_argument(
        "density matrix has a negative eigenvalue: " +
        std::to_string(solver.eigenvalues().minCoeff()));
  return BosonDensityMatrix{std::move(m)};
}

Operator spin_sigma_x() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  return Operator{std::move(m), true};
}

Operator spin_sigma_z() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 1.0;   // spin up
  m(1, 1) = -1.0;  // spin down
  return Operator{std::move(m), true};
}

Operator spin_identity() { return Operator{Matrix::Identity(2, 2), true}; }

Operator boson_identity(const HilbertConfig& cfg) {
  const int d = cfg.boson_dim();
  return Operator{Matrix::Identity(d, d), true};
}

BosonOps build_boson_ops(const HilbertConfig& cfg) {
  const int d = cfg.boson_dim();
  Matrix a = Matrix::Zero(d, d);
  for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(double(n));
  Matrix a_dag = a.adjoint();
  Matrix n_op = Matrix::Zero(d, d);
  for (int n = 0; n < d; ++n) n_op(n, n) = double(n);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  Matrix q = (a + a_dag) * inv_sqrt2;
  Matrix p = complexd(0.0, -1.0) * (a - a_dag) * inv_sqrt2;
  return BosonOps{Operator{std::move(a), false},
                  Operator{std::move(a_dag), false},
                  Operator{std::move(n_op), true},
                  Operator::hermitian_checked(std::move(q)),
                  Operator::hermitian_checked(std::move(p))};
}

Operator tensor(const Operator& boson_op, const Operator& spin_op) {
  if (spin_op.dim() != 2)
    throw std::invalid_argument("spin factor must be 2-dimensional, got " +
                                std::to_string(spin_op.dim()));
  const int db = boson_op.dim();
  Matrix out(2 * db, 2 * db);
  for (int i = 0; i < db; ++i)
    for (int j = 0; j < db; ++j)
      out.block<2, 2>(2 * i, 2 * j) = boson_op.entries(i, j) * spin_op.entries;
  return Operator{std::move(out), boson_op.hermitian && spin_op.hermitian};
}

EighResult eigh(const Operator& op) {
  if (!op.hermitian)
    throw std::invalid_argument(
        "eigh requires an operator constructed as hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(op.entries);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("hermitian eigendecomposition failed");
  return EighResult{solver.eigenvalues(), solver.eigenvectors()};
}

HybridState apply_diag_exp(const HybridState& state, const Matrix& eigvecs,
                           const Eigen::VectorXd& eigvals, double t) {
  if (eigvecs.rows() != state.dim() || eigvecs.cols() != eigvals.size())
    throw std::invalid_argument("apply_diag_exp: dimension mismatch");
  Vector coeffs = eigvecs.adjoint() * state.amplitudes;
  for (int k = 0; k < coeffs.size(); ++k)
    coeffs[k] *= std::exp(complexd(0.0, -t * eigvals[k]));
  return HybridState{eigvecs * coeffs};
}

BosonDensityMatrix partial_trace_spin(const HybridState& state) {
  const int d = state.dim();
  if (d % 2 != 0)
    throw std::invalid_argument(
        "partial_trace_spin expects a hybrid-basis state of even dimension");
  if (std::abs(state.norm() - 1.0) > 1e-10)
    throw std::invalid_argument(
        "partial_trace_spin expects a normalized state, |psi| = " +
        std::to_string(state.norm()));
  const int db = d / 2;
  Matrix rho(db, db);
  for (int m = 0; m < db; ++m)
    for (int n = 0; n < db; ++n)
      rho(m, n) = state.amplitudes[2 * m] * std::conj(state.amplitudes[2 * n]) +
                  state.amplitudes[2 * m + 1] *
                      std::conj(state.amplitudes[2 * n + 1]);
  return BosonDensityMatrix{std::move(rho)};
}

double parity_expectation(const HybridState& state) {
  double acc = 0.0;
  for (int i = 0; i < state.dim(); ++i) {
    const int n = i / 2;
    const int s = i % 2;
    const double sign = ((n % 2 == 0) ? 1.0 : -1.0) * (s == 0 ? 1.0 : -1.0);
    acc += sign * std::norm(state.amplitudes[i]);
  }
  return acc;
}

}  // namespace rabivqe
