#include "pdncg/continuation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "pdncg/newton_system.hpp"

namespace pdncg {

namespace {

int order_of_magnitude(double v) {
  // Guard exact powers of ten against log10 round-off (log10(1e-5) may land
  // a hair above -5).
  const double e = std::log10(1.0 / v);
  const double r = std::round(e);
  if (std::abs(e - r) < 1e-12) return static_cast<int>(r);
  return static_cast<int>(std::ceil(e));
}

}  // namespace

ContinuationSchedule make_schedule(double c_target, double mu_target) {
  if (!(c_target > 0.0) || !(mu_target > 0.0) || !std::isfinite(c_target) ||
      !std::isfinite(mu_target)) {
    throw std::invalid_argument("continuation targets must be positive and finite");
  }
  ContinuationSchedule s;
  s.vartheta = std::max(order_of_magnitude(c_target), order_of_magnitude(mu_target));
  if (s.vartheta < 2) {
    s.stages.push_back({c_target, mu_target});
    return s;
  }
  const double lc = std::log10(c_target);
  const double lm = std::log10(mu_target);
  for (int j = 0; j < s.vartheta; ++j) {
    const double t = static_cast<double>(j) / s.vartheta;
    s.stages.push_back({std::pow(10.0, -1.0 + t * (lc + 1.0)), std::pow(10.0, -1.0 + t * (lm + 1.0))});
  }
  s.stages.front() = {1.0e-1, 1.0e-1};
  s.stages.push_back({c_target, mu_target});
  return s;
}

SolverState run_continuation(const SmoothedObjective& target, const ContinuationConfig& cfg,
                             const ContinuationSchedule& schedule) {
  if (schedule.stages.empty()) throw std::invalid_argument("empty continuation schedule");
  SolverState state = SolverState::zeros(target.n(), target.l());
  std::vector<IterationRecord> trace;
  std::vector<StateSnapshot> snaps;
  const std::size_t last = schedule.stages.size() - 1;
  for (std::size_t j = 0; j <= last; ++j) {
    const auto& st = schedule.stages[j];
    const SmoothedObjective obj = target.with_parameters(st.c, st.mu);
    SolverConfig sc = cfg.solver;
    if (st.mu > schedule.precond_enable_mu) sc.precond = PrecondMode::identity();
    if (j < last) sc.grad_tol *= cfg.early_stage_tol_factor;
    project_linf(state.g_re, state.g_im);
    state.trace.clear();
    state.snapshots.clear();
    try {
      state = solve_subproblem(obj, sc, std::move(state), static_cast<int>(j));
    } catch (const SolverAbort& e) {
      throw SolverAbort("continuation stage " + std::to_string(j) + ": " + e.what());
    }
    trace.insert(trace.end(), state.trace.begin(), state.trace.end());
    snaps.insert(snaps.end(), state.snapshots.begin(), state.snapshots.end());
  }
  state.trace = std::move(trace);
  state.snapshots = std::move(snaps);
  return state;
}

}  // namespace pdncg
