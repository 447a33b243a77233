#pragma once

#include <span>
#include <vector>

#include "rabivqe/hilbert.hpp"
#include "rabivqe/vqe.hpp"

namespace rabivqe {

// |<a|b>|^2 for equal-length normalized vectors.
double fidelity(const Vector& a, const Vector& b);
double fidelity(const HybridState& a, const HybridState& b);

// Phase-space quasi-probability on a rectangular grid,
// values(i, j) = W(q_axis[i], p_axis[j]). Normalized so that
// sum(values) * dq * dp -> 1 for grids spanning the state.
struct WignerGrid {
  Eigen::VectorXd q_axis;
  Eigen::VectorXd p_axis;
  Eigen::MatrixXd values;

  double cell_area() const;
  double total_mass() const;  // sum * cell_area
};

Eigen::VectorXd uniform_axis(double lo, double hi, int npts);

// W(q, p) of a Fock-basis density matrix through the harmonic-oscillator
// cross-Wigner kernel (generalized-Laguerre form).
double wigner_point(const BosonDensityMatrix& rho, double q, double p);

// Rejects density matrices that fail hermiticity/trace/positivity checks.
WignerGrid wigner(const BosonDensityMatrix& rho, const Eigen::VectorXd& q_axis,
                  const Eigen::VectorXd& p_axis);

// Position-space wavefunction of a pure bosonic state given Fock amplitudes.
double position_wavefunction_sq(const Vector& fock_amplitudes, double x);
complexd position_wavefunction(const Vector& fock_amplitudes, double x);

// Independent cross-check for pure states: direct quadrature of
// (1/2pi) Int conj(psi(q + u/2)) psi(q - u/2) e^{i p u} du.
double wigner_point_quadrature(const Vector& fock_amplitudes, double q,
                               double p);

// Fock populations, diagonal of the reduced density matrix.
std::vector<double> fock_distribution(const BosonDensityMatrix& rho);

struct QuadratureStats {
  double mean_q = 0.0;
  double mean_p = 0.0;
  double dq = 0.0;       // std deviation of q
  double dp = 0.0;       // std deviation of p
  double product = 0.0;  // dq * dp
};

QuadratureStats quadrature_stats(const BosonDensityMatrix& rho,
                                 const Operator& q, const Operator& p);

// Least squares in log-log space: y ~ exp(log_prefactor) * x^exponent.
// Requires at least 3 strictly positive samples.
struct PowerLawFit {
  double exponent = 0.0;
  double log_prefactor = 0.0;
  double r_squared = 0.0;
};

PowerLawFit powerlaw_fit(std::span<const double> x, std::span<const double> y);

// Per-block diagnostics of a captured circuit application. Row 0 is the
// initial state, row j the state after block j.
struct BlockTraceRow {
  int block = 0;
  double dq = 0.0;
  double dp = 0.0;
  double product = 0.0;
  double parity = 0.0;
  double norm = 0.0;
  std::vector<double> fock;
};

std::vector<BlockTraceRow> block_trace_report(
    const VqeRun& run, const std::vector<HybridState>& capture);

}  // namespace rabivqe
