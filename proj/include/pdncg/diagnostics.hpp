#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pdncg/solver.hpp"

namespace pdncg {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct DiagnosticReport {
  std::vector<CheckResult> checks;

  bool passed() const;
  void add(CheckResult c) { checks.push_back(std::move(c)); }
  void merge(const DiagnosticReport& other);
  /// "name,passed,value,threshold,detail"
  std::string csv() const;
  /// One "PASS|FAIL name: detail" line per check.
  std::string text() const;
};

struct DerivativeErrors {
  double grad_max_error = 0.0;  // max ||g_fd - g|| / ||g||
  double hess_max_error = 0.0;  // max ||H_fd v - H v|| / ||H v||
  int trials = 0;
};

/// Central-difference step cbrt(eps) * max(1, ||x||_inf).
double fd_step(std::span<const double> x);

/// Central differences at random points x ~ N(0, s^2) and directions
/// v ~ N(0, 1) scaled to unit max-norm. The gradient is compared in full, one coordinate at a time,
/// so keep n small (<= 256).
DerivativeErrors check_derivatives(const SmoothedObjective& obj, int trials, std::uint64_t seed,
                                   double point_scale = 1.0);
DiagnosticReport derivative_report(const DerivativeErrors& e, const std::string& label,
                                   double grad_tol = 1e-6, double hess_tol = 1e-5);

struct InvariantOptions {
  double tau2 = 1.0e-3;
  double box_tol = 1.0e-12;
  double energy_tol = 1.0e-8;
  /// Slack on the PCG stopping test to absorb the round-off between the
  /// recurrence and the explicit residual.
  double pcg_slack = 1.0e-10;
};

/// Monotone objective and sufficient decrease per stage, dual box at every
/// iteration and snapshot, energy identity and the explicit PCG stopping
/// rule. Requires a trace produced with verify_steps. Failures name the
/// first offending (stage, iteration).
DiagnosticReport check_solver_invariants(const std::vector<IterationRecord>& trace,
                                         const std::vector<StateSnapshot>& snapshots,
                                         const InvariantOptions& options = {});

/// ||grad f(x^{k+1})|| / ||grad f(x^k)|| over consecutive rows of the final
/// stage in the trace. With `last` > 0 only the final `last` ratios are
/// returned.
std::vector<double> rate_probe(const std::vector<IterationRecord>& trace, int last = 0);

/// Last three ratios strictly decreasing and the final one below `final_max`.
CheckResult superlinear_check(const std::vector<double>& ratios, double final_max = 0.1);

}  // namespace pdncg
