#pragma once

// Seeded self-check suites shared by the command-line tool and the
// acceptance runner.

#include <string>
#include <vector>

#include "pdncg/diagnostics.hpp"

namespace pdncg::suites {

/// Finite-difference checks: iTV 8x8 (mu = 1e-2), dense real W, dense
/// complex W; 50 trials each.
DiagnosticReport derivatives();

/// Solver invariants on small iTV runs (eta 0.1 and 0.99, exact banded and
/// truncated-CG preconditioning, one continuation run).
DiagnosticReport invariants();

/// Superlinear rate probe with the decreasing eta schedule on 16x16.
DiagnosticReport rate();

/// Invariant check of a healthy run whose duals were corrupted
/// (||g||_inf = 1.5) at one snapshot; expected to fail.
DiagnosticReport fault();

/// Names accepted by run(): derivatives, invariants, rate, all, fault.
const std::vector<std::string>& names();

/// Throws std::invalid_argument for an unknown name.
DiagnosticReport run(const std::string& name);

}  // namespace pdncg::suites
