#pragma once

#include <vector>

#include "pdncg/solver.hpp"

namespace pdncg {

struct ContinuationStage {
  double c = 0.0;
  double mu = 0.0;
};

struct ContinuationSchedule {
  std::vector<ContinuationStage> stages;
  int vartheta = 0;
  double precond_enable_mu = 1.0e-4;
};

/// vartheta = max(ceil(log10(1/c)), ceil(log10(1/mu))). For vartheta >= 2
/// the stages j = 0..vartheta run log-linearly from (1e-1, 1e-1) to the
/// targets, otherwise a single stage at the targets. The last stage is
/// assigned the targets exactly.
ContinuationSchedule make_schedule(double c_target, double mu_target);

struct ContinuationConfig {
  SolverConfig solver;  // its precond is the mode used once enabled
  /// Looser tolerance factor for every stage but the last.
  double early_stage_tol_factor = 10.0;
};

/// Solves the stages in order, warm-starting each from the previous x and the
/// re-projected duals. Preconditioning (cfg.solver.precond) is active only
/// once mu_j <= schedule.precond_enable_mu. A SolverAbort is re-thrown with
/// the stage index prepended.
SolverState run_continuation(const SmoothedObjective& target, const ContinuationConfig& cfg,
                             const ContinuationSchedule& schedule);

}  // namespace pdncg
