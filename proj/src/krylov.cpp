#include "pdncg/krylov.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "pdncg/kernels.hpp"

namespace pdncg {

namespace {

void require_finite(double v, const char* what, int iteration) {
  if (!std::isfinite(v)) {
    throw SolverAbort(std::string("PCG: non-finite ") + what + " at iteration " +
                      std::to_string(iteration));
  }
}

}  // namespace

PcgOutcome pcg_solve(const LinearAction& op, std::span<const double> rhs,
                     const LinearAction& precond, const PcgOptions& options) {
  if (!(options.eta >= 0.0 && options.eta < 1.0)) {
    throw std::invalid_argument("PCG tolerance eta must lie in [0, 1)");
  }
  const std::size_t n = rhs.size();
  PcgOutcome out;
  out.solution.assign(n, 0.0);

  Vector r(rhs.begin(), rhs.end());
  const double rhs_norm = kernels::norm2(r);
  require_finite(rhs_norm, "right-hand side", 0);
  const double target = options.eta * rhs_norm;
  out.final_residual_norm = rhs_norm;
  if (rhs_norm == 0.0) {
    out.converged = true;
    out.status = PcgStatus::converged;
    return out;
  }

  Vector& x = out.solution;
  Vector z(n), p(n), q(n), check(n);
  std::vector<Vector> dirs, op_dirs;
  std::vector<double> curvatures;

  auto precondition = [&](const Vector& in, Vector& res) {
    if (precond) {
      precond(in, res);
      ++out.preconditioner_applications;
    } else {
      res = in;
    }
  };

  double rz_old = 0.0;
  double r_norm = rhs_norm;
  for (int it = 1; it <= options.max_iterations; ++it) {
    precondition(r, z);
    if (options.conjugation == Conjugation::local) {
      const double rz = kernels::dot(r, z);
      require_finite(rz, "preconditioned residual", it);
      if (it == 1) {
        p = z;
      } else {
        kernels::xpby(z, rz / rz_old, p);
      }
      rz_old = rz;
    } else {
      p = z;
      for (std::size_t i = 0; i < dirs.size(); ++i) {
        const double beta = kernels::dot(op_dirs[i], z) / curvatures[i];
        kernels::axpy(-beta, dirs[i], p);
      }
    }

    op(p, q);
    const double curvature = kernels::dot(p, q);
    require_finite(curvature, "curvature", it);
    if (curvature <= 0.0) {
      out.status = PcgStatus::negative_curvature;
      out.iterations = it - 1;
      out.final_residual_norm = r_norm;
      return out;
    }
    const double alpha = kernels::dot(p, r) / curvature;
    kernels::axpy(alpha, p, x);
    kernels::axpy(-alpha, q, r);
    r_norm = kernels::norm2(r);
    require_finite(r_norm, "residual", it);
    out.iterations = it;

    if (options.conjugation == Conjugation::full) {
      dirs.push_back(p);
      op_dirs.push_back(q);
      curvatures.push_back(curvature);
    }

    if (options.residual_check_every > 0 && it % options.residual_check_every == 0) {
      op(x, check);
      double diff2 = 0.0, true2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double t = rhs[i] - check[i];
        true2 += t * t;
        diff2 += (t - r[i]) * (t - r[i]);
      }
      if (true2 > 0.0) out.residual_drift = std::max(out.residual_drift, std::sqrt(diff2 / true2));
    }

    if (r_norm <= target) {
      out.converged = true;
      out.status = PcgStatus::converged;
      break;
    }
  }
  out.final_residual_norm = r_norm;
  return out;
}

}  // namespace pdncg
