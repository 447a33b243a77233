#include "rabivqe/analysis.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace rabivqe {

namespace {

constexpr double kPi = std::numbers::pi;

void check_normalized(const Vector& v, const char* who) {
  if (std::abs(v.norm() - 1.0) > 1e-10)
    throw std::invalid_argument(std::string(who) +
                                " expects normalized states");
}

// Kernel sum for one phase-space point. See wigner_point for the convention.
double wigner_point_impl(const Matrix& rho, double q, double p) {
  const int d = static_cast<int>(rho.rows());
  const double y = 2.0 * (q * q + p * p);
  const complexd beta = std::sqrt(2.0) * complexd(q, p);
  const double expfac = std::exp(-0.5 * y);

  double w = 0.0;
  complexd beta_pow = 1.0;  // beta^k
  for (int k = 0; k < d; ++k) {
    // r_m = sqrt(m!/(m+k)!), L_m^{(k)}(y) by upward recurrence in m.
    double r = 1.0;
    for (int j = 1; j <= k; ++j) r /= std::sqrt(double(j));
    double lag_prev = 0.0;
    double lag = 1.0;
    double sign = 1.0;
    complexd acc = 0.0;
    for (int m = 0; m + k < d; ++m) {
      if (m > 0) {
        const double lag_next =
            ((double(2 * (m - 1) + k + 1) - y) * lag -
             double(m - 1 + k) * lag_prev) /
            double(m);
        lag_prev = lag;
        lag = lag_next;
        r *= std::sqrt(double(m) / double(m + k));
        sign = -sign;
      }
      acc += rho(m, m + k) * (sign * r * lag);
    }
    const complexd term = acc * beta_pow * expfac;
    w += (k == 0) ? term.real() : 2.0 * term.real();
    beta_pow *= beta;
  }
  return w / kPi;
}

}  // namespace

double fidelity(const Vector& a, const Vector& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("fidelity requires equal dimensions");
  check_normalized(a, "fidelity");
  check_normalized(b, "fidelity");
  return std::norm(a.dot(b));
}

double fidelity(const HybridState& a, const HybridState& b) {
  return fidelity(a.amplitudes, b.amplitudes);
}

double WignerGrid::cell_area() const {
  if (q_axis.size() < 2 || p_axis.size() < 2)
    throw std::invalid_argument("grid needs at least 2 points per axis");
  return (q_axis[1] - q_axis[0]) * (p_axis[1] - p_axis[0]);
}

double WignerGrid::total_mass() const { return values.sum() * cell_area(); }

Eigen::VectorXd uniform_axis(double lo, double hi, int npts) {
  if (npts < 2 || !(hi > lo))
    throw std::invalid_argument("axis needs hi > lo and at least 2 points");
  Eigen::VectorXd v(npts);
  for (int i = 0; i < npts; ++i)
    v[i] = lo + (hi - lo) * double(i) / double(npts - 1);
  return v;
}

double wigner_point(const BosonDensityMatrix& rho, double q, double p) {
  return wigner_point_impl(rho.entries, q, p);
}

WignerGrid wigner(const BosonDensityMatrix& rho,
                  const Eigen::VectorXd& q_axis,
                  const Eigen::VectorXd& p_axis) {
  // Re-validate: rejects non-hermitian, non-unit-trace or non-PSD input.
  BosonDensityMatrix checked = BosonDensityMatrix::validated(rho.entries);

  WignerGrid grid;
  grid.q_axis = q_axis;
  grid.p_axis = p_axis;
  grid.values.resize(q_axis.size(), p_axis.size());
  for (int i = 0; i < q_axis.size(); ++i)
    for (int j = 0; j < p_axis.size(); ++j)
      grid.values(i, j) = wigner_point_impl(checked.entries, q_axis[i],
                                            p_axis[j]);
  return grid;
}

complexd position_wavefunction(const Vector& fock_amplitudes, double x) {
  const int d = static_cast<int>(fock_amplitudes.size());
  double phi_prev = 0.0;
  double phi = std::pow(kPi, -0.25) * std::exp(-0.5 * x * x);
  complexd acc = fock_amplitudes[0] * phi;
  for (int n = 1; n < d; ++n) {
    const double phi_next = std::sqrt(2.0 / n) * x * phi -
                            std::sqrt(double(n - 1) / n) * phi_prev;
    phi_prev = phi;
    phi = phi_next;
    acc += fock_amplitudes[n] * phi;
  }
  return acc;
}

double position_wavefunction_sq(const Vector& fock_amplitudes, double x) {
  return std::norm(position_wavefunction(fock_amplitudes, x));
}

double wigner_point_quadrature(const Vector& fock_amplitudes, double q,
                               double p) {
  check_normalized(fock_amplitudes, "wigner_point_quadrature");
  const int d = static_cast<int>(fock_amplitudes.size());
  const double support = std::sqrt(2.0 * d + 1.0) + 6.0;
  const double half = 2.0 * (support + std::abs(q)) + 2.0;
  int n = static_cast<int>(std::ceil(2.0 * half / 0.01));
  if (n % 2 != 0) ++n;
  const double h = 2.0 * half / n;

  complexd sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double u = -half + i * h;
    const complexd f =
        std::conj(position_wavefunction(fock_amplitudes, q + 0.5 * u)) *
        position_wavefunction(fock_amplitudes, q - 0.5 * u) *
        std::exp(complexd(0.0, p * u));
    const double weight = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    sum += weight * f;
  }
  sum *= h / 3.0;
  return (sum / (2.0 * kPi)).real();
}

std::vector<double> fock_distribution(const BosonDensityMatrix& rho) {
  std::vector<double> pops(rho.dim());
  for (int n = 0; n < rho.dim(); ++n) pops[n] = rho.entries(n, n).real();
  return pops;
}

QuadratureStats quadrature_stats(const BosonDensityMatrix& rho,
                                 const Operator& q, const Operator& p) {
  if (q.dim() != rho.dim() || p.dim() != rho.dim())
    throw std::invalid_argument("quadrature operators do not match the mode");
  auto expval = [&](const Matrix& op) {
    return (rho.entries * op).trace().real();
  };
  QuadratureStats st;
  st.mean_q = expval(q.entries);
  st.mean_p = expval(p.entries);
  const double q2 = expval(q.entries * q.entries);
  const double p2 = expval(p.entries * p.entries);
  st.dq = std::sqrt(std::max(0.0, q2 - st.mean_q * st.mean_q));
  st.dp = std::sqrt(std::max(0.0, p2 - st.mean_p * st.mean_p));
  st.product = st.dq * st.dp;
  return st;
}

PowerLawFit powerlaw_fit(std::span<const double> x,
                         std::span<const double> y) {
  if (x.size() != y.size())
    throw std::invalid_argument("powerlaw_fit needs equal-length samples");
  if (x.size() < 3)
    throw std::invalid_argument("powerlaw_fit needs at least 3 samples");
  const int n = static_cast<int>(x.size());
  std::vector<double> lx(n), ly(n);
  for (int i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw std::invalid_argument(
          "powerlaw_fit requires strictly positive samples");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0)
    throw std::invalid_argument("powerlaw_fit: degenerate abscissa");

  PowerLawFit fit;
  fit.exponent = sxy / sxx;
  fit.log_prefactor = my - fit.exponent * mx;
  if (syy == 0.0) {
    fit.r_squared = 1.0;
  } else {
    double ss_res = 0.0;
    for (int i = 0; i < n; ++i) {
      const double resid = ly[i] - (fit.log_prefactor + fit.exponent * lx[i]);
      ss_res += resid * resid;
    }
    fit.r_squared = 1.0 - ss_res / syy;
  }
  return fit;
}

std::vector<BlockTraceRow> block_trace_report(
    const VqeRun& run, const std::vector<HybridState>& capture) {
  if (static_cast<int>(capture.size()) != run.depth)
    throw std::invalid_argument(
        "block capture length must equal the run depth");
  const HilbertConfig cfg = HilbertConfig::with_cutoff(run.fock_cutoff);
  const BosonOps ops = build_boson_ops(cfg);

  std::vector<BlockTraceRow> rows;
  rows.reserve(capture.size() + 1);
  auto add_row = [&](int index, const HybridState& state) {
    BlockTraceRow row;
    row.block = index;
    row.norm = state.norm();
    row.parity = parity_expectation(state);
    const BosonDensityMatrix rho = partial_trace_spin(state);
    const QuadratureStats st = quadrature_stats(rho, ops.q, ops.p);
    row.dq = st.dq;
    row.dp = st.dp;
    row.product = st.product;
    row.fock = fock_distribution(rho);
    rows.push_back(std::move(row));
  };

  add_row(0, initial_state(cfg));
  for (int j = 0; j < static_cast<int>(capture.size()); ++j)
    add_row(j + 1, capture[j]);
  return rows;
}

}  // namespace rabivqe
