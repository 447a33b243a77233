#include "rabivqe/vqe.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "rabivqe/analysis.hpp"

namespace rabivqe {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic per-restart stream, independent of platform RNG choices.
struct UniformStream {
  std::uint64_t state;
  explicit UniformStream(std::uint64_t seed) : state(seed) {}
  // in [-1, 1)
  double next_pm() {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return 2.0 * ((z >> 11) * 0x1.0p-53) - 1.0;
  }
};

std::uint64_t restart_seed(std::uint64_t seed, int depth, int restart) {
  return splitmix64(seed ^ splitmix64(std::uint64_t(depth) ^
                                      splitmix64(std::uint64_t(restart))));
}

double expectation(const Operator& h, const HybridState& state) {
  const complexd e = state.amplitudes.dot(h.entries * state.amplitudes);
  if (std::abs(e.imag()) > 1e-8)
    throw std::runtime_error("cost has imaginary residual " +
                             std::to_string(e.imag()));
  return e.real();
}

AnsatzParams slice_params(const AnsatzParams& params, int from_block) {
  AnsatzParams tail;
  tail.values.assign(params.values.begin() + 3 * from_block,
                     params.values.end());
  return tail;
}

struct MinimizeOutcome {
  Eigen::VectorXd x;
  double f = std::numeric_limits<double>::infinity();
  std::vector<double> history;
  bool aborted = false;
  int iterations = 0;
};

// Strong-Wolfe line search (bracketing + zoom). The directional derivative
// at trial points is a central difference along the search direction with
// the same physical half-step as the full gradient, so each trial costs at
// most three cost evaluations. Falls back to the best sufficient-decrease
// point when the curvature condition is unattainable (e.g. once the
// remaining slope is below the finite-difference noise floor).
struct LineSearchResult {
  double alpha = 0.0;
  double f = std::numeric_limits<double>::infinity();
  bool ok = false;
};

template <typename PhiFn, typename DPhiFn>
LineSearchResult wolfe_search(const PhiFn& phi, const DPhiFn& dphi, double f0,
                              double slope0) {
  constexpr double c1 = 1e-4;
  // A small curvature constant makes the search nearly exact; trial
  // derivatives are cheap here (two cost evaluations), and the better
  // 1-D minima noticeably improve the quasi-Newton pairs in the stiff,
  // near-critical valleys.
  constexpr double c2 = 0.1;
  constexpr double alpha_max = 1024.0;

  LineSearchResult fallback;  // best strict sufficient-decrease point so far
  auto note = [&](double a, double f) {
    if (std::isfinite(f) && f <= f0 + c1 * a * slope0 && f < fallback.f) {
      fallback = {a, f, true};
    }
  };

  double lo = 0.0, f_lo = f0;        // endpoint satisfying sufficient decrease
  double hi = -1.0, f_hi = 0.0;      // endpoint bracketing from above
  double g_lo = slope0;              // slope at lo (known exactly at entry)
  double a_prev = 0.0, f_prev = f0, g_prev = slope0;
  double a = 1.0;
  bool bracketed = false;

  for (int i = 0; i < 20 && !bracketed; ++i) {
    const double fa = phi(a);
    note(a, fa);
    if (!std::isfinite(fa) || fa > f0 + c1 * a * slope0 ||
        (i > 0 && fa >= f_prev)) {
      lo = a_prev;
      f_lo = f_prev;
      g_lo = g_prev;
      hi = a;
      f_hi = fa;
      bracketed = true;
      break;
    }
    const double da = dphi(a);
    if (std::abs(da) <= -c2 * slope0) return {a, fa, true};
    if (da >= 0.0) {
      lo = a;
      f_lo = fa;
      g_lo = da;
      hi = a_prev;
      f_hi = f_prev;
      bracketed = true;
      break;
    }
    a_prev = a;
    f_prev = fa;
    g_prev = da;
    if (a >= alpha_max) break;
    a = std::min(2.0 * a, alpha_max);
  }
  if (!bracketed) return fallback;

  for (int i = 0; i < 40; ++i) {
    if (!(std::abs(hi - lo) > 1e-12 * std::max(1.0, std::abs(lo)))) break;
    // Quadratic model through (lo, f_lo, g_lo) and (hi, f_hi); its minimizer
    // replaces plain bisection when it lands safely inside the interval,
    // which typically pins the one-dimensional minimum in a couple of trials.
    double cand = 0.5 * (lo + hi);
    const double span = hi - lo;
    const double a_min = std::min(lo, hi), a_max = std::max(lo, hi);
    const double margin = 0.1 * (a_max - a_min);
    const double denom = f_hi - f_lo - g_lo * span;
    if (std::isfinite(denom) && denom > 0.0) {
      const double t = lo - 0.5 * g_lo * span * span / denom;
      if (std::isfinite(t) && t >= a_min + margin && t <= a_max - margin)
        cand = t;
    }
    const double fm = phi(cand);
    note(cand, fm);
    if (!std::isfinite(fm) || fm > f0 + c1 * cand * slope0 || fm >= f_lo) {
      hi = cand;
      f_hi = fm;
      continue;
    }
    const double dm = dphi(cand);
    if (std::abs(dm) <= -c2 * slope0) return {cand, fm, true};
    if (dm * (hi - lo) >= 0.0) {
      hi = lo;
      f_hi = f_lo;
    }
    lo = cand;
    f_lo = fm;
    g_lo = dm;
  }
  return fallback;
}

// The three block generators act on very different scales (spin flips,
// Fock-number phases, mode displacement), so the cost curvature spans
// several orders of magnitude across parameter types. The inverse Hessian
// is therefore seeded from a measured curvature diagonal (hdiag_fn, an
// inverse-curvature estimate at a given point), re-measured whenever the
// metric is reset. Progress stalls below convergence_tol trigger one such
// re-seed before the descent is declared converged: a fresh local metric
// routinely unlocks further progress in ill-conditioned valleys, and
// terminating only when it does not keeps the energy-change test honest.
template <typename CostFn, typename GradFn, typename HDiagFn>
MinimizeOutcome bfgs_minimize(const CostFn& cost_fn, const GradFn& grad_fn,
                              Eigen::VectorXd x0, const OptimizerConfig& cfg,
                              const HDiagFn& hdiag_fn) {
  using Eigen::MatrixXd;
  using Eigen::VectorXd;

  MinimizeOutcome out;
  VectorXd x = std::move(x0);
  double fx = cost_fn(x);
  if (!std::isfinite(fx)) {
    out.aborted = true;
    return out;
  }
  out.history.push_back(fx);

  MatrixXd hinv = hdiag_fn(x).asDiagonal();
  bool scaled = false;
  VectorXd grad = grad_fn(x);
  constexpr int kResetBudget = 3;  // metric re-seeds allowed per plateau
  constexpr int kWindow = 8;  // accepted steps per convergence check
  int resets_left = kResetBudget;
  double f_mark = fx;
  int steps_since_mark = 0;

  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    out.iterations = iter + 1;
    if (!grad.allFinite()) {
      out.aborted = true;
      return out;
    }
    if (grad.norm() < 1e-13) break;

    VectorXd dir = -(hinv * grad);
    double slope = grad.dot(dir);
    bool reset_dir = false;
    if (!(slope < 0.0)) {
      hinv = hdiag_fn(x).asDiagonal();
      scaled = false;
      dir = -(hinv * grad);
      slope = grad.dot(dir);
      reset_dir = true;
      if (!(slope < 0.0)) break;
    }

    const double dir_norm = dir.norm();
    const double delta = cfg.gradient_step / dir_norm;
    auto phi = [&](double a) { return cost_fn(x + a * dir); };
    auto dphi = [&](double a) {
      return (cost_fn(x + (a + delta) * dir) -
              cost_fn(x + (a - delta) * dir)) /
             (2.0 * delta);
    };
    const LineSearchResult ls = wolfe_search(phi, dphi, fx, slope);
    if (!ls.ok) {
      // No decrease above noise along this direction. Retry once with a
      // freshly measured metric; if the metric is already fresh, the
      // remaining slope is below the noise floor and the descent is done.
      if (reset_dir || !scaled) break;
      hinv = hdiag_fn(x).asDiagonal();
      scaled = false;
      continue;
    }
    VectorXd xnew = x + ls.alpha * dir;
    const double fnew = ls.f;

    VectorXd gnew = grad_fn(xnew);
    const VectorXd s = xnew - x;
    const VectorXd yv = gnew - grad;
    x = std::move(xnew);
    fx = fnew;
    grad = std::move(gnew);
    out.history.push_back(fx);

    const double sy = s.dot(yv);
    if (sy > 1e-14 * s.norm() * yv.norm()) {
      if (!scaled) {
        hinv *= sy / yv.dot(hinv * yv);
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const VectorXd hy = hinv * yv;
      const double yhy = yv.dot(hy);
      hinv.noalias() -= rho * (s * hy.transpose() + hy * s.transpose());
      hinv.noalias() += (rho * rho * yhy + rho) * (s * s.transpose());
    }

    // Convergence is judged on whole windows of accepted steps, not single
    // steps: long ill-conditioned valleys are crossed at a slow but steady
    // rate, and a single sub-threshold step must not end (or re-seed) a
    // descent that is still paying for itself over the window.
    ++steps_since_mark;
    if (steps_since_mark >= kWindow) {
      const double drop = f_mark - fx;
      if (drop < kWindow * cfg.convergence_tol) {
        if (resets_left == 0) break;  // fresh metrics did not help: converged
        hinv = hdiag_fn(x).asDiagonal();
        scaled = false;
        --resets_left;
      } else if (drop >= 10.0 * kWindow * cfg.convergence_tol) {
        resets_left = kResetBudget;  // real progress re-arms the budget
      }
      f_mark = fx;
      steps_since_mark = 0;
    }
  }

  out.x = std::move(x);
  out.f = fx;
  return out;
}

}  // namespace

double cost(const CompiledAnsatz& ansatz, const Operator& h,
            const AnsatzParams& params, const HybridState& psi0) {
  const AnsatzApplication app = apply_ansatz(ansatz, params, psi0);
  return expectation(h, app.final_state);
}

std::vector<double> gradient(const CompiledAnsatz& ansatz, const Operator& h,
                             const AnsatzParams& params,
                             const HybridState& psi0, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
  const int p = params.depth();

  // States after the first j blocks; the circuit prefix before the perturbed
  // block is unchanged by the perturbation, so it is applied once.
  std::vector<HybridState> prefix;
  prefix.reserve(p + 1);
  prefix.push_back(psi0);
  for (int j = 0; j < p; ++j) {
    AnsatzParams one;
    one.values.assign(params.values.begin() + 3 * j,
                      params.values.begin() + 3 * (j + 1));
    prefix.push_back(apply_ansatz(ansatz, one, prefix.back()).final_state);
  }

  std::vector<double> grad(3 * p);
  for (int k = 0; k < 3 * p; ++k) {
    const int j = k / 3;
    AnsatzParams tail = slice_params(params, j);
    const int local = k - 3 * j;
    const double saved = tail.values[local];
    tail.values[local] = saved + step;
    const double f_plus =
        expectation(h, apply_ansatz(ansatz, tail, prefix[j]).final_state);
    tail.values[local] = saved - step;
    const double f_minus =
        expectation(h, apply_ansatz(ansatz, tail, prefix[j]).final_state);
    grad[k] = (f_plus - f_minus) / (2.0 * step);
  }
  return grad;
}

VqeRun optimize_depth(const CompiledAnsatz& ansatz, const Operator& h_full,
                      int depth, const OptimizerConfig& cfg,
                      const AnsatzParams* warm_start) {
  if (depth < 1) throw std::invalid_argument("depth must be at least 1");
  if (warm_start && warm_start->depth() != depth - 1)
    throw std::invalid_argument(
        "warm start must come from a depth-" + std::to_string(depth - 1) +
        " solution");
  const auto t0 = std::chrono::steady_clock::now();

  const HybridState psi0 = initial_state(ansatz.cfg);
  Eigen::VectorXd base = Eigen::VectorXd::Zero(3 * depth);
  if (warm_start)
    for (std::size_t i = 0; i < warm_start->values.size(); ++i)
      base[static_cast<int>(i)] = warm_start->values[i];

  auto to_params = [&](const Eigen::VectorXd& x) {
    AnsatzParams p;
    p.values.assign(x.data(), x.data() + x.size());
    return p;
  };
  auto cost_fn = [&](const Eigen::VectorXd& x) {
    return cost(ansatz, h_full, to_params(x), psi0);
  };
  auto grad_fn = [&](const Eigen::VectorXd& x) {
    const std::vector<double> g =
        gradient(ansatz, h_full, to_params(x), psi0, cfg.gradient_step);
    return Eigen::Map<const Eigen::VectorXd>(g.data(), g.size()).eval();
  };

  // Measured inverse-curvature diagonal at a point, used to seed the
  // inverse Hessian. The second-difference step is deliberately coarser
  // than the gradient step: curvature only needs a few correct digits, and
  // the wider stencil keeps the estimate clear of roundoff.
  auto inv_curvature_diag = [&](const Eigen::VectorXd& x0) {
    constexpr double h = 1e-3;
    const double f0 = cost_fn(x0);
    Eigen::VectorXd d(x0.size());
    Eigen::VectorXd probe = x0;
    for (int k = 0; k < x0.size(); ++k) {
      const double saved = probe[k];
      probe[k] = saved + h;
      const double fp = cost_fn(probe);
      probe[k] = saved - h;
      const double fm = cost_fn(probe);
      probe[k] = saved;
      d[k] = std::abs(fp - 2.0 * f0 + fm) / (h * h);
    }
    Eigen::VectorXd inv(d.size());
    const double dmax = d.maxCoeff();
    if (!(dmax > 1e-12)) {  // flat (or non-finite) start: isotropic seed
      inv.setOnes();
      return inv;
    }
    const double floor = 1e-6 * dmax;
    for (int k = 0; k < d.size(); ++k) inv[k] = 1.0 / std::max(d[k], floor);
    if (!inv.allFinite()) inv.setOnes();
    return inv;
  };

  MinimizeOutcome best;
  int best_restart = -1;
  int aborted = 0;
  for (int r = 0; r < cfg.restarts; ++r) {
    Eigen::VectorXd x0 = base;
    if (r > 0) {
      UniformStream stream(restart_seed(cfg.seed, depth, r));
      for (int i = 0; i < x0.size(); ++i)
        x0[i] += cfg.init_scale * stream.next_pm();
    }
    MinimizeOutcome outcome =
        bfgs_minimize(cost_fn, grad_fn, x0, cfg, inv_curvature_diag);
    if (outcome.aborted) {
      ++aborted;
      continue;
    }
    if (best_restart < 0 || outcome.f < best.f) {
      best = std::move(outcome);
      best_restart = r;
    }
  }
  if (best_restart < 0)
    throw std::runtime_error("every optimizer restart aborted");

  VqeRun run;
  run.fock_cutoff = ansatz.cfg.fock_cutoff;
  run.depth = depth;
  run.best_thetas = to_params(best.x);
  run.best_energy = best.f;
  run.energy_history = std::move(best.history);
  run.seed = cfg.seed;
  run.best_restart = best_restart;
  run.aborted_restarts = aborted;
  run.final_state =
      apply_ansatz(ansatz, run.best_thetas, psi0).final_state;

  const GroundState gs = exact_ground_state(h_full);
  run.exact_energy = gs.energy;
  run.fidelity = fidelity(run.final_state, gs.state);

  run.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return run;
}

std::vector<VqeRun> depth_sweep(const RabiParams& params, int p_max,
                                const HilbertConfig& hilbert,
                                const OptimizerConfig& cfg) {
  if (p_max < 1) throw std::invalid_argument("p_max must be at least 1");
  const HamiltonianSet hams = build_hamiltonians(params, hilbert);
  const CompiledAnsatz ansatz = compile_ansatz(hilbert, hams);

  std::vector<VqeRun> runs;
  runs.reserve(p_max);
  const AnsatzParams* warm = nullptr;
  for (int p = 1; p <= p_max; ++p) {
    VqeRun run = optimize_depth(ansatz, hams.h_full, p, cfg, warm);
    run.params = params;
    runs.push_back(std::move(run));
    warm = &runs.back().best_thetas;
  }
  return runs;
}

}  // namespace rabivqe
