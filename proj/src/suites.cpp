#include "pdncg/suites.hpp"

#include <cmath>
#include <stdexcept>
#include <type_traits>

#include "pdncg/continuation.hpp"
#include "pdncg/problems.hpp"
#include "pdncg/random.hpp"

namespace pdncg::suites {

namespace {

DiagnosticReport prefixed(const DiagnosticReport& r, const std::string& prefix) {
  DiagnosticReport out;
  for (auto c : r.checks) {
    c.name = prefix + "." + c.name;
    out.add(std::move(c));
  }
  return out;
}

SmoothedObjective itv_objective(Index size, double c, double mu, std::uint64_t seed) {
  const auto inst = make_itv_instance(shepp_logan(std::max<Index>(size, 16), std::max<Index>(size, 16)),
                                      0.25, 30.0, seed);
  if (size >= 16) return SmoothedObjective(c, mu, inst.A, inst.W, inst.b);
  // Sub-16 sizes: random data on a fresh operator pair.
  Rng rng(seed);
  const Index n = size * size;
  const auto a = make_partial_dct2(size, size, SamplingMask::random_with_dc(n, n / 4, seed));
  return SmoothedObjective(c, mu, a, make_gradient2d(size, size), rng.normal_vector(n / 4));
}

OperatorPtr dense_real(Index rows, Index cols, Rng& rng, double scale) {
  std::vector<double> e(static_cast<std::size_t>(rows * cols));
  for (auto& v : e) v = scale * rng.normal();
  return make_dense_dictionary(rows, cols, e);
}

// Gaussian dictionary with unit-norm atoms (columns).
template <class T>
OperatorPtr dense_atoms(Index rows, Index cols, Rng& rng) {
  std::vector<T> e(static_cast<std::size_t>(rows * cols));
  for (Index j = 0; j < cols; ++j) {
    double nrm = 0.0;
    for (Index i = 0; i < rows; ++i) {
      auto& v = e[static_cast<std::size_t>(j * rows + i)];
      if constexpr (std::is_same_v<T, Complex>) {
        v = Complex(rng.normal(), rng.normal());
      } else {
        v = rng.normal();
      }
      nrm += std::norm(v);
    }
    for (Index i = 0; i < rows; ++i) e[static_cast<std::size_t>(j * rows + i)] /= std::sqrt(nrm);
  }
  if constexpr (std::is_same_v<T, Complex>) {
    return make_dense_dictionary(rows, cols, e, Field::complex);
  } else {
    return make_dense_dictionary(rows, cols, e);
  }
}

SolverState run_with_snapshots(const SmoothedObjective& obj, SolverConfig cfg) {
  cfg.snapshot_every = 1;
  cfg.verify_steps = true;
  return solve_subproblem(obj, cfg, SolverState::zeros(obj.n(), obj.l()));
}

CheckResult converged_check(const SolverState& s) {
  return {"converged", s.converged, static_cast<double>(s.outer_iterations), 0.0,
          std::to_string(s.outer_iterations) + " outer iterations"};
}

}  // namespace

DiagnosticReport derivatives() {
  DiagnosticReport rep;
  rep.merge(derivative_report(check_derivatives(itv_objective(8, 0.05, 1e-2, 1), 50, 101), "derivatives.itv8x8"));

  Rng rng(2);
  const Index n = 24, m = 12, l = 32;
  {
    SmoothedObjective obj(0.1, 1e-2, dense_real(m, n, rng, 1.0 / std::sqrt(double(m))),
                          dense_atoms<double>(n, l, rng), rng.normal_vector(m));
    rep.merge(derivative_report(check_derivatives(obj, 50, 102), "derivatives.real_dense"));
  }
  {
    SmoothedObjective obj(0.1, 1e-2, dense_real(m, n, rng, 1.0 / std::sqrt(double(m))),
                          dense_atoms<Complex>(n, l, rng), rng.normal_vector(m));
    rep.merge(derivative_report(check_derivatives(obj, 50, 103), "derivatives.complex_dense"));
  }
  return rep;
}

DiagnosticReport invariants() {
  DiagnosticReport rep;
  const auto obj = itv_objective(16, 0.05, 1e-3, 2);
  for (double eta : {0.1, 0.99}) {
    SolverConfig cfg;
    cfg.eta = eta;
    cfg.grad_tol = 1e-8;
    cfg.precond = PrecondMode::exact_banded();
    const auto s = run_with_snapshots(obj, cfg);
    const std::string tag = eta < 0.5 ? "invariants.exact_eta0.1" : "invariants.exact_eta0.99";
    rep.merge(prefixed(check_solver_invariants(s.trace, s.snapshots), tag));
    if (eta < 0.5) {
      auto c = converged_check(s);
      c.name = tag + "." + c.name;
      rep.add(c);
    }
  }
  {
    SolverConfig cfg;
    cfg.grad_tol = 1e-8;
    cfg.precond = PrecondMode::truncated_cg(15);
    const auto s = run_with_snapshots(obj, cfg);
    rep.merge(prefixed(check_solver_invariants(s.trace, s.snapshots), "invariants.cg15"));
  }
  {
    const auto target = itv_objective(16, 2e-2, 1e-5, 3);
    ContinuationConfig cfg;
    cfg.solver.grad_tol = 1e-6;
    cfg.solver.precond = PrecondMode::exact_banded();
    cfg.solver.snapshot_every = 1;
    const auto s = run_continuation(target, cfg, make_schedule(2e-2, 1e-5));
    rep.merge(prefixed(check_solver_invariants(s.trace, s.snapshots), "invariants.continuation"));
  }
  return rep;
}

DiagnosticReport rate() {
  const auto obj = itv_objective(16, 0.05, 1e-3, 5);
  SolverConfig cfg;
  cfg.grad_tol = 1e-9;
  cfg.eta_schedule = EtaSchedule::decreasing;
  cfg.precond = PrecondMode::exact_banded();
  const auto s = solve_subproblem(obj, cfg, SolverState::zeros(obj.n(), obj.l()));
  DiagnosticReport rep;
  auto c = superlinear_check(rate_probe(s.trace));
  c.name = "rate." + c.name;
  rep.add(c);
  return rep;
}

DiagnosticReport fault() {
  const auto obj = itv_objective(16, 0.05, 1e-3, 2);
  SolverConfig cfg;
  cfg.grad_tol = 1e-8;
  cfg.precond = PrecondMode::exact_banded();
  auto s = run_with_snapshots(obj, cfg);
  const std::size_t k = std::min<std::size_t>(3, s.snapshots.size() - 1);
  s.snapshots[k].g_re[7] = 1.5;
  s.snapshots[k].g_im[7] = 0.0;
  return prefixed(check_solver_invariants(s.trace, s.snapshots), "fault");
}

const std::vector<std::string>& names() {
  static const std::vector<std::string> n{"derivatives", "invariants", "rate", "all", "fault"};
  return n;
}

DiagnosticReport run(const std::string& name) {
  if (name == "derivatives") return derivatives();
  if (name == "invariants") return invariants();
  if (name == "rate") return rate();
  if (name == "fault") return fault();
  if (name == "all") {
    DiagnosticReport r = derivatives();
    r.merge(invariants());
    r.merge(rate());
    return r;
  }
  throw std::invalid_argument("unknown suite '" + name + "'");
}

}  // namespace pdncg::suites
