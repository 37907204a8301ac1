#include "pdncg/solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "pdncg/kernels.hpp"
#include "pdncg/newton_system.hpp"

namespace pdncg {

SolverState SolverState::zeros(Index n, Index l) {
  SolverState s;
  s.x.assign(static_cast<std::size_t>(n), 0.0);
  s.g_re.assign(static_cast<std::size_t>(l), 0.0);
  s.g_im.assign(static_cast<std::size_t>(l), 0.0);
  return s;
}

LineSearchResult line_search(const SmoothedObjective& obj, const Vector& x, const Vector& dx,
                             double energy, double tau1, double tau2, int max_backtracks,
                             std::optional<double> f_x) {
  if (!(tau1 > 0.0 && tau1 < 1.0) || !(tau2 > 0.0 && tau2 < 0.5) || max_backtracks < 0) {
    throw std::invalid_argument("line search parameters out of range");
  }
  const double f0 = f_x ? *f_x : objective_value(obj, x);
  if (!std::isfinite(f0)) throw SolverAbort("line search: non-finite objective at current point");
  Vector trial(x.size());
  LineSearchResult res;
  double alpha = 1.0;
  for (int j = 0; j <= max_backtracks; ++j) {
    for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] + alpha * dx[i];
    const double f = objective_value(obj, trial);
    if (!std::isfinite(f)) {
      throw SolverAbort("line search: non-finite objective at backtrack " + std::to_string(j));
    }
    res.alpha = alpha;
    res.backtracks = j;
    res.f_new = f;
    if (f <= f0 - tau2 * alpha * energy) {
      res.accepted = true;
      return res;
    }
    if (j < max_backtracks) alpha *= tau1;
  }
  res.accepted = false;
  if (res.f_new > f0) {
    // Keep x rather than increase the objective; the caller still moves the duals.
    res.alpha = 0.0;
    res.f_new = f0;
  }
  return res;
}

namespace {

void check_box(const Vector& re, const Vector& im) {
  for (std::size_t i = 0; i < re.size(); ++i) {
    if (std::hypot(re[i], im[i]) > 1.0 + 1e-12) {
      throw std::invalid_argument("initial duals violate the unit box at component " +
                                  std::to_string(i));
    }
  }
}

double dual_inf_norm(const Vector& re, const Vector& im) {
  double m = 0.0;
  for (std::size_t i = 0; i < re.size(); ++i) m = std::max(m, std::hypot(re[i], im[i]));
  return m;
}

}  // namespace

SolverState solve_subproblem(const SmoothedObjective& obj, const SolverConfig& cfg,
                             SolverState state, int stage) {
  const auto n = static_cast<std::size_t>(obj.n());
  const auto l = static_cast<std::size_t>(obj.l());
  if (state.x.size() != n || state.g_re.size() != l || state.g_im.size() != l) {
    throw std::invalid_argument("initial state has wrong dimensions");
  }
  if (!(cfg.eta >= 0.0 && cfg.eta < 1.0)) throw std::invalid_argument("eta must lie in [0, 1)");
  if (!(cfg.grad_tol > 0.0)) throw std::invalid_argument("grad_tol must be positive");
  check_box(state.g_re, state.g_im);

  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  state.converged = false;
  state.stagnated = false;
  state.outer_iterations = 0;
  state.grad = objective_grad(obj, state.x);
  double f = objective_value(obj, state.x);
  double gnorm = kernels::norm2(state.grad);
  if (!std::isfinite(f) || !std::isfinite(gnorm)) throw SolverAbort("non-finite initial objective");
  const double tol = cfg.grad_tol * std::max(1.0, gnorm);

  Vector rhs(n), bdx(n);
  for (int k = 0;; ++k) {
    if (cfg.snapshot_every > 0 && k % cfg.snapshot_every == 0) {
      state.snapshots.push_back({stage, k, state.x, state.g_re, state.g_im});
    }
    if (gnorm <= tol || k >= cfg.max_outer || state.stagnated) {
      IterationRecord rec;
      rec.stage = stage;
      rec.iter = k;
      rec.f = f;
      rec.grad_norm = gnorm;
      rec.dual_inf_norm = dual_inf_norm(state.g_re, state.g_im);
      rec.f_next = f;
      rec.terminal = true;
      rec.time_s = elapsed();
      state.trace.push_back(rec);
      state.converged = gnorm <= tol;
      state.outer_iterations = k;
      return state;
    }

    IterationRecord rec;
    rec.stage = stage;
    rec.iter = k;
    rec.f = f;
    rec.grad_norm = gnorm;

    const NewtonSystem sys(obj, state.x, state.g_re, state.g_im);
    const Preconditioner pre = Preconditioner::build(sys, cfg.rho, cfg.precond);
    rec.rho_doublings = pre.rho_doublings();

    PcgOptions opts;
    opts.eta = cfg.eta_schedule == EtaSchedule::fixed ? cfg.eta
                                                      : std::min(cfg.eta, std::sqrt(gnorm));
    opts.max_iterations = cfg.max_pcg_iterations;
    opts.conjugation = pre.is_linear() ? cfg.conjugation : Conjugation::full;
    rec.eta = opts.eta;
    for (std::size_t i = 0; i < n; ++i) rhs[i] = -state.grad[i];
    const LinearAction op = [&sys](std::span<const double> v, std::span<double> o) {
      sys.bhat_matvec(v, o);
    };
    PcgOutcome pcg = pcg_solve(op, rhs, pre.action(), opts);
    if (pcg.status == PcgStatus::negative_curvature) {
      throw SolverAbort("PCG detected nonpositive curvature at outer iteration " +
                        std::to_string(k));
    }
    const Vector& dx = pcg.solution;
    rec.pcg_iters = pcg.iterations;
    rec.grad_dot_dx = kernels::dot(state.grad, dx);
    // Zero-started PCG gives dx^T B^ dx = dx^T rhs = -grad^T dx.
    rec.energy = -rec.grad_dot_dx;
    rec.pcg_rel_residual = pcg.final_residual_norm / gnorm;
    if (cfg.verify_steps) {
      sys.bhat_matvec(dx, bdx);
      rec.energy_explicit = kernels::dot(dx, bdx);
      double r2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) r2 += (bdx[i] + state.grad[i]) * (bdx[i] + state.grad[i]);
      rec.pcg_rel_residual = std::sqrt(r2) / gnorm;
    }

    auto [dg_re, dg_im] = sys.dual_step(dx);
    for (std::size_t i = 0; i < l; ++i) {
      state.g_re[i] += dg_re[i];
      state.g_im[i] += dg_im[i];
    }
    project_linf(state.g_re, state.g_im);
    rec.dual_inf_norm = dual_inf_norm(state.g_re, state.g_im);

    const LineSearchResult ls =
        line_search(obj, state.x, dx, rec.energy, cfg.tau1, cfg.tau2, cfg.max_backtracks, f);
    if (!ls.accepted && !cfg.verify_steps) {
      sys.bhat_matvec(dx, bdx);
      rec.energy_explicit = kernels::dot(dx, bdx);
    }
    rec.alpha = ls.alpha;
    rec.backtracks = ls.backtracks;
    rec.accepted = ls.accepted;
    kernels::axpy(ls.alpha, dx, state.x);

    f = ls.f_new;
    rec.f_next = f;
    // x did not move and the Armijo test cannot resolve the predicted
    // decrease in floating point: the next iteration would be identical.
    if (ls.alpha == 0.0 &&
        cfg.tau2 * rec.energy <= 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(f))) {
      state.stagnated = true;
    }
    state.grad = objective_grad(obj, state.x);
    gnorm = kernels::norm2(state.grad);
    if (!std::isfinite(gnorm)) {
      throw SolverAbort("non-finite gradient after outer iteration " + std::to_string(k));
    }
    rec.time_s = elapsed();
    state.trace.push_back(rec);
  }
}

}  // namespace pdncg
