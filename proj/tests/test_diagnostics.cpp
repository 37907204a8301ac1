#include "doctest.h"

#include "pdncg/diagnostics.hpp"
#include "pdncg/problems.hpp"
#include "pdncg/random.hpp"

using namespace pdncg;

namespace {

SolverState healthy_run(std::uint64_t seed) {
  const auto inst = make_itv_instance(shepp_logan(16, 16), 0.25, kNoNoise, seed);
  SmoothedObjective obj(0.05, 1e-3, inst.A, inst.W, inst.b);
  SolverConfig cfg;
  cfg.grad_tol = 1e-8;
  cfg.precond = PrecondMode::exact_banded();
  cfg.snapshot_every = 1;
  return solve_subproblem(obj, cfg, SolverState::zeros(obj.n(), obj.l()));
}

const CheckResult& find(const DiagnosticReport& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return c;
  throw std::runtime_error("missing check " + name);
}

}  // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("derivative checks on iTV 8x8, mu = 1e-2") {
  const auto inst = make_itv_instance(shepp_logan(32, 32), 0.25, kNoNoise, 1);
  const auto w = make_gradient2d(8, 8);
  const auto a = make_partial_dct2(8, 8, SamplingMask::random_with_dc(64, 16, 1));
  SmoothedObjective obj(0.05, 1e-2, a, w, Vector(16, 0.2));
  const auto e = check_derivatives(obj, 50, 17);
  CHECK(e.trials == 50);
  const auto rep = derivative_report(e, "itv");
  INFO(rep.text());
  CHECK(rep.passed());
  CHECK(rep.checks.size() == 2);
  CHECK_THROWS_AS(check_derivatives(SmoothedObjective(0.1, 1e-2, inst.A, inst.W, inst.b), 1, 1),
                  std::invalid_argument);
}

TEST_CASE("zero A reduces to the pseudo-Huber terms") {
  const auto w = make_gradient2d(4, 4);
  const auto zero = make_dense_dictionary(3, 16, std::vector<double>(48, 0.0));
  SmoothedObjective obj(1.0, 1e-2, zero, w, Vector(3, 0.0));
  const auto e = check_derivatives(obj, 20, 2);
  CHECK(e.grad_max_error <= 1e-6);
  CHECK(e.hess_max_error <= 1e-5);
  Rng rng(3);
  const Vector x = rng.normal_vector(16);
  const Vector g = objective_grad(obj, x), gp = grad_psi(x, *w, 1e-2);
  for (std::size_t i = 0; i < 16; ++i) CHECK(g[i] == doctest::Approx(gp[i]));
}

TEST_CASE("fd step") {
  CHECK(fd_step(Vector{0.1, -0.5}) == doctest::Approx(std::cbrt(std::numeric_limits<double>::epsilon())));
  CHECK(fd_step(Vector{3.0, -8.0}) == doctest::Approx(8.0 * std::cbrt(std::numeric_limits<double>::epsilon())));
}

TEST_CASE("healthy run passes every invariant") {
  const auto s = healthy_run(2);
  const auto rep = check_solver_invariants(s.trace, s.snapshots);
  INFO(rep.text());
  CHECK(rep.passed());
  CHECK(rep.checks.size() == 5);
}

TEST_CASE("corrupted dual is reported at the right iteration") {
  auto s = healthy_run(3);
  REQUIRE(s.snapshots.size() > 3);
  auto& snap = s.snapshots[2];
  snap.g_re[5] = 1.5;
  snap.g_im[5] = 0.0;
  const auto rep = check_solver_invariants(s.trace, s.snapshots);
  CHECK_FALSE(rep.passed());
  const auto& box = find(rep, "dual_box");
  CHECK_FALSE(box.passed);
  CHECK(box.value == doctest::Approx(1.5));
  CHECK(box.detail.find("iter " + std::to_string(snap.iter)) != std::string::npos);
  CHECK(find(rep, "energy_identity").passed);

  auto t = healthy_run(3);
  t.trace[1].dual_inf_norm = 1.5;
  const auto rt = check_solver_invariants(t.trace, {});
  CHECK(find(rt, "dual_box").detail.find("stage 0 iter 1") != std::string::npos);
}

TEST_CASE("monotonicity, energy and PCG violations are named") {
  auto s = healthy_run(4);
  REQUIRE(s.trace.size() > 3);
  s.trace[2].f_next = s.trace[2].f + 1.0;
  s.trace[1].energy_explicit *= 1.01;
  s.trace[0].pcg_rel_residual = 2.0 * s.trace[0].eta;
  const auto rep = check_solver_invariants(s.trace, {});
  CHECK(find(rep, "monotone_objective").detail.find("stage 0 iter 2") != std::string::npos);
  CHECK(find(rep, "energy_identity").detail.find("stage 0 iter 1") != std::string::npos);
  CHECK(find(rep, "pcg_stopping_rule").detail.find("stage 0 iter 0") != std::string::npos);
  CHECK_FALSE(find(rep, "sufficient_decrease").passed);
}

TEST_CASE("rate probe and superlinear check") {
  std::vector<IterationRecord> tr(6);
  const double g[] = {1.0, 0.5, 0.1, 0.005, 1e-5, 1e-11};
  for (int k = 0; k < 6; ++k) {
    tr[static_cast<std::size_t>(k)].stage = k < 1 ? 0 : 1;
    tr[static_cast<std::size_t>(k)].grad_norm = g[k];
  }
  const auto r = rate_probe(tr);
  REQUIRE(r.size() == 4);  // final stage only
  CHECK(r[0] == doctest::Approx(0.2));
  CHECK(rate_probe(tr, 2).size() == 2);
  CHECK(superlinear_check(r).passed);
  CHECK_FALSE(superlinear_check({0.5, 0.5, 0.01}).passed);
  CHECK_FALSE(superlinear_check({0.5, 0.3, 0.2}).passed);
  CHECK_FALSE(superlinear_check({0.1}).passed);
}

TEST_CASE("report formatting") {
  DiagnosticReport r;
  r.add({"a", true, 1.0, 2.0, "fine, really"});
  r.add({"b", false, 3.0, 2.0, "broken"});
  CHECK_FALSE(r.passed());
  CHECK(r.text() == "PASS a: fine, really\nFAIL b: broken\n");
  const std::string csv = r.csv();
  CHECK(csv.rfind("name,passed,value,threshold,detail\n", 0) == 0);
  CHECK(csv.find("a,1,1,2,fine; really\n") != std::string::npos);
  DiagnosticReport m;
  m.merge(r);
  CHECK(m.checks.size() == 2);
}

}
