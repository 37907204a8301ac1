#pragma once

// Primal-dual Newton conjugate gradients for one smoothed subproblem
// min_x c psi_mu(W^* x) + 1/2 ||A x - b||^2 with (c, mu) fixed.

#include <optional>
#include <vector>

#include "pdncg/krylov.hpp"
#include "pdncg/precond.hpp"
#include "pdncg/smoothing.hpp"

namespace pdncg {

enum class EtaSchedule {
  fixed,       // eta_k = eta
  decreasing,  // eta_k = min(eta, sqrt(||grad f(x^k)||))
};

struct SolverConfig {
  double eta = 0.1;
  double tau1 = 0.9;
  double tau2 = 1.0e-3;
  int max_backtracks = 10;
  double rho = 0.5;
  double grad_tol = 1.0e-6;  // relative to max(1, ||grad f(x^0)||)
  int max_outer = 200;
  int max_pcg_iterations = 200;
  PrecondMode precond = PrecondMode::identity();
  EtaSchedule eta_schedule = EtaSchedule::fixed;
  /// Conjugation for linear preconditioners; nonlinear ones always use full.
  /// Full conjugation keeps the energy identity at round-off level.
  Conjugation conjugation = Conjugation::full;
  /// Recompute B^ dx explicitly each iteration to record the true PCG
  /// residual and energy (one extra matvec).
  bool verify_steps = true;
  /// Store (x, g) every this many iterations; 0 disables snapshots.
  int snapshot_every = 0;
};

struct IterationRecord {
  int stage = 0;
  int iter = 0;
  double f = 0.0;          // f(x^k)
  double grad_norm = 0.0;  // ||grad f(x^k)||
  int pcg_iters = 0;
  double alpha = 0.0;
  int backtracks = 0;
  bool accepted = true;
  double time_s = 0.0;     // elapsed since the start of the solve at the end of this row
  // Step diagnostics (zero on the terminal row).
  double eta = 0.0;
  double energy = 0.0;           // dx^T B^ dx used by the line search
  double energy_explicit = 0.0;  // recomputed with an explicit matvec (verify_steps)
  double grad_dot_dx = 0.0;      // grad f(x^k)^T dx
  double pcg_rel_residual = 0.0; // ||B^ dx + grad f|| / ||grad f|| (explicit when verified)
  double dual_inf_norm = 0.0;    // ||g^{k+1}||_inf after projection
  double f_next = 0.0;           // f(x^{k+1})
  int rho_doublings = 0;
  bool terminal = false;
};

struct StateSnapshot {
  int stage = 0;
  int iter = 0;
  Vector x;
  Vector g_re;
  Vector g_im;
};

struct SolverState {
  Vector x;
  Vector g_re;
  Vector g_im;
  Vector grad;
  int outer_iterations = 0;
  bool converged = false;
  /// Stopped because a rejected step predicted a decrease below the
  /// round-off level of f; no further progress is measurable.
  bool stagnated = false;
  std::vector<IterationRecord> trace;
  std::vector<StateSnapshot> snapshots;

  /// x = 0, g = 0 for an objective of size (n, l).
  static SolverState zeros(Index n, Index l);
};

struct LineSearchResult {
  double alpha = 1.0;
  int backtracks = 0;
  bool accepted = true;
  double f_new = 0.0;
};

/// Least j >= 0 with f(x + tau1^j dx) <= f(x) - tau2 tau1^j energy. On
/// exhaustion returns accepted = false with alpha = tau1^max_backtracks, or
/// alpha = 0 if even that step would increase f.
/// Throws SolverAbort on a non-finite objective.
LineSearchResult line_search(const SmoothedObjective& obj, const Vector& x, const Vector& dx,
                             double energy, double tau1, double tau2, int max_backtracks,
                             std::optional<double> f_x = std::nullopt);

/// Runs pdNCG from `init` (the duals must lie in the unit box). Stops on the
/// gradient test, the iteration cap, or stagnation (see SolverState). Throws
/// SolverAbort on negative curvature or non-finite values.
SolverState solve_subproblem(const SmoothedObjective& obj, const SolverConfig& config,
                             SolverState init, int stage = 0);

}  // namespace pdncg
