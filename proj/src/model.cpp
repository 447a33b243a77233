#include "rabivqe/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rabivqe {

namespace {

void check_frequencies(double omega0, double Omega) {
  if (!(omega0 > 0.0))
    throw std::invalid_argument("omega0 must be positive");
  if (!(Omega > 0.0)) throw std::invalid_argument("Omega must be positive");
}

}  // namespace

double RabiParams::g() const { return 2.0 * lam / std::sqrt(omega0 * Omega); }

RabiParams RabiParams::from_lambda(double omega0, double Omega, double lam) {
  check_frequencies(omega0, Omega);
  if (lam < 0.0) throw std::invalid_argument("lambda must be non-negative");
  return RabiParams{omega0, Omega, lam};
}

RabiParams RabiParams::from_g(double omega0, double Omega, double g) {
  check_frequencies(omega0, Omega);
  if (g < 0.0) throw std::invalid_argument("g must be non-negative");
  return RabiParams{omega0, Omega, g * std::sqrt(omega0 * Omega) / 2.0};
}

HamiltonianSet build_hamiltonians(const RabiParams& params,
                                  const HilbertConfig& cfg) {
  const BosonOps ops = build_boson_ops(cfg);
  const Operator id_b = boson_identity(cfg);

  Operator h1 = tensor(id_b, spin_sigma_z());
  Operator h2 = tensor(ops.n_op, spin_identity());
  Matrix x_mat = ops.a.entries + ops.a_dag.entries;
  Operator h3 =
      tensor(Operator{std::move(x_mat), true}, spin_sigma_x());

  Matrix full = params.omega0 * h2.entries +
                (params.Omega / 2.0) * h1.entries - params.lam * h3.entries;
  Operator h_full{std::move(full), true};

  // Low-frequency quadratic model on the boson space:
  // omega0 a_dag a - (omega0 g^2 / 4)(a + a_dag)^2 - Omega/2.
  const double gsq = params.g() * params.g();
  Matrix x_b = ops.a.entries + ops.a_dag.entries;
  Matrix eff = params.omega0 * ops.n_op.entries -
               (params.omega0 * gsq / 4.0) * (x_b * x_b) -
               (params.Omega / 2.0) *
                   Matrix::Identity(cfg.boson_dim(), cfg.boson_dim());
  Operator h_eff{std::move(eff), true};

  Matrix par_b = Matrix::Zero(cfg.boson_dim(), cfg.boson_dim());
  for (int n = 0; n < cfg.boson_dim(); ++n)
    par_b(n, n) = (n % 2 == 0) ? 1.0 : -1.0;
  Operator parity = tensor(Operator{std::move(par_b), true}, spin_sigma_z());

  return HamiltonianSet{std::move(h_full), std::move(h1), std::move(h2),
                        std::move(h3),     std::move(h_eff),
                        std::move(parity)};
}

GroundState exact_ground_state(const Operator& h_full) {
  const int d = h_full.dim();
  if (d % 2 != 0)
    throw std::invalid_argument(
        "exact_ground_state expects a hybrid-basis Hamiltonian of even "
        "dimension");
  const EighResult eig = eigh(h_full);
  const double gap = eig.eigenvalues[1] - eig.eigenvalues[0];

  // Count the levels degenerate with the ground level; within that subspace
  // rotate to a representative with definite symmetry (largest |<parity>|,
  // preferring the negative sector on an exact tie).
  int deg = 1;
  while (deg < d && eig.eigenvalues[deg] - eig.eigenvalues[0] < 1e-10) ++deg;

  HybridState state{eig.eigenvectors.col(0)};
  if (deg > 1) {
    Vector par_diag(d);
    for (int n = 0; n < d / 2; ++n) {
      const double pn = (n % 2 == 0) ? 1.0 : -1.0;
      par_diag[2 * n] = pn;
      par_diag[2 * n + 1] = -pn;
    }
    const Matrix sub = eig.eigenvectors.leftCols(deg);
    Matrix restricted = sub.adjoint() * (par_diag.asDiagonal() * sub);
    restricted = 0.5 * (restricted + restricted.adjoint().eval());
    const EighResult par_eig = eigh(Operator{std::move(restricted), true});
    int pick = 0;
    for (int k = 1; k < deg; ++k) {
      const double best = std::abs(par_eig.eigenvalues[pick]);
      const double cand = std::abs(par_eig.eigenvalues[k]);
      if (cand > best + 1e-12 ||
          (std::abs(cand - best) <= 1e-12 &&
           par_eig.eigenvalues[k] < par_eig.eigenvalues[pick]))
        pick = k;
    }
    Vector rotated = sub * par_eig.eigenvectors.col(pick);
    rotated /= rotated.norm();
    state = HybridState{std::move(rotated)};
  }

  return GroundState{eig.eigenvalues[0], state, gap,
                     parity_expectation(state)};
}

Operator build_squeeze_operator(double x, const HilbertConfig& cfg) {
  if (std::abs(x) > 3.0)
    throw std::invalid_argument(
        "squeeze parameter |x| = " + std::to_string(std::abs(x)) +
        " exceeds 3; the truncated mode cannot represent the result "
        "faithfully");
  const BosonOps ops = build_boson_ops(cfg);
  // exp((x/2)(a_dag^2 - a^2)) = exp(-i x G) with the Hermitian generator
  // G = (i/2)(a_dag^2 - a^2).
  Matrix gen = complexd(0.0, 0.5) * (ops.a_dag.entries * ops.a_dag.entries -
                                     ops.a.entries * ops.a.entries);
  const EighResult eig = eigh(Operator::hermitian_checked(std::move(gen)));
  Vector phases(eig.eigenvalues.size());
  for (int k = 0; k < phases.size(); ++k)
    phases[k] = std::exp(complexd(0.0, -x * eig.eigenvalues[k]));
  Matrix s = eig.eigenvectors * phases.asDiagonal() *
             eig.eigenvectors.adjoint();
  return Operator{std::move(s), false};
}

double critical_squeezing_x(double g) {
  if (!(g >= 0.0) || g >= 1.0)
    throw std::domain_error(
        "critical squeezing is defined for 0 <= g < 1, got " +
        std::to_string(g));
  return -0.25 * std::log1p(-g * g);
}

}  // namespace rabivqe
