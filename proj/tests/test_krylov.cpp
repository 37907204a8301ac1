#include "doctest.h"

#include "oracles.hpp"
#include "pdncg/krylov.hpp"

using namespace pdncg;
using namespace oracle;

namespace {

LinearAction dense_action(const MatR& m) {
  return [m](std::span<const double> in, std::span<double> out) {
    Eigen::Map<VecR>(out.data(), static_cast<Index>(out.size())) =
        m * Eigen::Map<const VecR>(in.data(), static_cast<Index>(in.size()));
  };
}

MatR random_spd(Index n, std::uint64_t seed) {
  const MatR m = random_matrix(n, n, seed);
  return m.transpose() * m + MatR::Identity(n, n);
}

}  // namespace

TEST_SUITE("krylov") {

TEST_CASE("identity operator converges in one iteration") {
  const Vector rhs{1.0, -2.0, 0.5};
  const auto out = pcg_solve(dense_action(MatR::Identity(3, 3)), rhs, {}, {});
  CHECK(out.iterations == 1);
  CHECK(out.converged);
  CHECK(out.status == PcgStatus::converged);
  for (std::size_t i = 0; i < 3; ++i) CHECK(out.solution[i] == doctest::Approx(rhs[i]));
}

TEST_CASE("diag(1, 2, 4)") {
  MatR d = MatR::Zero(3, 3);
  d.diagonal() << 1.0, 2.0, 4.0;
  PcgOptions opt;
  opt.eta = 1e-12;
  const auto out = pcg_solve(dense_action(d), Vector{1.0, 2.0, 4.0}, {}, opt);
  CHECK(out.converged);
  for (double s : out.solution) CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("random SPD system against a dense solve, both conjugation modes") {
  const MatR m = random_spd(10, 1);
  Rng rng(2);
  const Vector rhs = rng.normal_vector(10);
  const VecR exact = m.llt().solve(to_eigen(rhs));
  for (auto mode : {Conjugation::local, Conjugation::full}) {
    PcgOptions opt;
    opt.eta = 1e-10;
    opt.conjugation = mode;
    const auto out = pcg_solve(dense_action(m), rhs, {}, opt);
    CHECK(out.converged);
    CHECK(rel(to_eigen(out.solution), exact) <= 1e-8);
    CHECK(out.final_residual_norm <= 1e-10 * to_eigen(rhs).norm() * 1.0000001);
  }
}

TEST_CASE("energy identity dx^T op dx = dx^T rhs") {
  const MatR m = random_spd(40, 3);
  Rng rng(4);
  const Vector rhs = rng.normal_vector(40);
  for (double eta : {0.5, 0.1, 1e-3}) {
    PcgOptions opt;
    opt.eta = eta;
    opt.conjugation = Conjugation::full;
    const auto out = pcg_solve(dense_action(m), rhs, {}, opt);
    const VecR dx = to_eigen(out.solution);
    const double lhs = dx.dot(m * dx), r = dx.dot(to_eigen(rhs));
    CHECK(std::abs(lhs - r) <= 1e-10 * std::abs(r));
    CHECK((m * dx - to_eigen(rhs)).norm() <= eta * to_eigen(rhs).norm());
  }
}

TEST_CASE("exact inverse preconditioner converges in one iteration") {
  const MatR m = random_spd(12, 5);
  Rng rng(6);
  const Vector rhs = rng.normal_vector(12);
  PcgOptions opt;
  opt.eta = 1e-10;
  const auto out = pcg_solve(dense_action(m), rhs, dense_action(m.inverse()), opt);
  CHECK(out.iterations == 1);
  CHECK(out.preconditioner_applications >= 1);
}

TEST_CASE("tracked residual matches the explicit residual") {
  // Ill-conditioned diagonal so the run lasts past several drift checks.
  MatR d = MatR::Zero(300, 300);
  for (Index i = 0; i < 300; ++i) d(i, i) = std::pow(10.0, 4.0 * i / 299.0);
  Rng rng(7);
  PcgOptions opt;
  opt.eta = 1e-9;
  opt.max_iterations = 250;
  opt.residual_check_every = 50;
  const auto out = pcg_solve(dense_action(d), rng.normal_vector(300), {}, opt);
  CHECK(out.iterations >= 50);
  CHECK(out.residual_drift <= 1e-8);
}

TEST_CASE("cap, negative curvature and non-finite input") {
  const MatR m = random_spd(30, 8);
  Rng rng(9);
  PcgOptions opt;
  opt.eta = 1e-14;
  opt.max_iterations = 3;
  const auto capped = pcg_solve(dense_action(m), rng.normal_vector(30), {}, opt);
  CHECK(capped.iterations == 3);
  CHECK_FALSE(capped.converged);
  CHECK(capped.status == PcgStatus::max_iterations);

  MatR indef = MatR::Identity(2, 2);
  indef(1, 1) = -1.0;
  const auto neg = pcg_solve(dense_action(indef), Vector{0.0, 1.0}, {}, {});
  CHECK(neg.status == PcgStatus::negative_curvature);
  CHECK_FALSE(neg.converged);

  CHECK_THROWS_AS(pcg_solve(dense_action(MatR::Identity(2, 2)), Vector{NAN, 1.0}, {}, {}), SolverAbort);
  PcgOptions bad;
  bad.eta = 1.0;
  CHECK_THROWS_AS(pcg_solve(dense_action(MatR::Identity(2, 2)), Vector{1.0, 1.0}, {}, bad),
                  std::invalid_argument);
}

TEST_CASE("zero right-hand side returns zero immediately") {
  const auto out = pcg_solve(dense_action(MatR::Identity(4, 4)), Vector(4, 0.0), {}, {});
  CHECK(out.iterations == 0);
  CHECK(out.converged);
  for (double s : out.solution) CHECK(s == 0.0);
}

}
