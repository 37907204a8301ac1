#pragma once

#include <functional>
#include <span>

#include "pdncg/types.hpp"

namespace pdncg {

/// out = M in, for a fixed linear (or, for preconditioners, possibly
/// nonlinear) map on R^n.
using LinearAction = std::function<void(std::span<const double> in, std::span<double> out)>;

enum class PcgStatus { converged, max_iterations, negative_curvature };

/// How new search directions are made conjugate to the old ones.
enum class Conjugation {
  /// Classical three-term recurrence; exact for fixed linear preconditioners.
  local,
  /// Explicit op-orthogonalization against every previous direction
  /// (flexible CG). Required when the preconditioner is not a fixed linear
  /// map, e.g. a truncated inner CG solve.
  full,
};

struct PcgOptions {
  double eta = 1.0e-1;  // stop when ||op(x) - rhs|| <= eta * ||rhs||
  int max_iterations = 200;
  Conjugation conjugation = Conjugation::local;
  int residual_check_every = 50;
};

struct PcgOutcome {
  Vector solution;
  int iterations = 0;
  double final_residual_norm = 0.0;
  bool converged = false;
  PcgStatus status = PcgStatus::max_iterations;
  /// Largest ||r_recurrence - r_explicit|| / ||r_explicit|| seen at the
  /// periodic residual checks (0 if none ran).
  double residual_drift = 0.0;
  int preconditioner_applications = 0;
};

/// Preconditioned conjugate gradients from the zero vector. The stopping test
/// uses the unpreconditioned residual rhs - op(x). An empty `precond` means
/// the identity. Throws SolverAbort on non-finite values.
PcgOutcome pcg_solve(const LinearAction& op, std::span<const double> rhs,
                     const LinearAction& precond, const PcgOptions& options);

}  // namespace pdncg
