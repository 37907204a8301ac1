#include "pdncg/precond.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "pdncg/kernels.hpp"

namespace pdncg {

std::string to_string(const PrecondMode& mode) {
  switch (mode.kind) {
    case PrecondKind::identity:
      return "identity";
    case PrecondKind::exact_banded:
      return "exact_banded";
    case PrecondKind::truncated_cg:
      return "truncated_cg(" + std::to_string(mode.inner_iterations) + ")";
  }
  return "unknown";
}

SymmetricBandMatrix assemble_preconditioner_band(const NewtonSystem& sys, double rho) {
  const auto rows = sys.objective().W().analysis_rows();
  if (!rows) throw std::invalid_argument("dictionary does not expose explicit analysis rows");
  const Index n = sys.n();
  const Index l = sys.l();
  Index w = 0;
  for (Index i = 0; i < l; ++i) {
    const auto k0 = static_cast<std::size_t>(rows->row_ptr[static_cast<std::size_t>(i)]);
    const auto k1 = static_cast<std::size_t>(rows->row_ptr[static_cast<std::size_t>(i) + 1]);
    if (k0 == k1) continue;
    const auto [lo, hi] = std::minmax_element(rows->col.begin() + static_cast<std::ptrdiff_t>(k0),
                                              rows->col.begin() + static_cast<std::ptrdiff_t>(k1));
    w = std::max(w, *hi - *lo);
  }
  SymmetricBandMatrix band(n, w);
  const double c = sys.objective().c();
  const auto& lre = sys.coeff_re();
  const auto& lim = sys.coeff_im();
  const auto& lx = sys.coeff_cross();
  for (Index i = 0; i < l; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const auto k0 = static_cast<std::size_t>(rows->row_ptr[ui]);
    const auto k1 = static_cast<std::size_t>(rows->row_ptr[ui + 1]);
    for (std::size_t s = k0; s < k1; ++s) {
      const double ps = rows->coeff[s].real();
      const double qs = -rows->coeff[s].imag();
      const Index cs = rows->col[s];
      for (std::size_t t = k0; t < k1; ++t) {
        const Index ct = rows->col[t];
        if (ct > cs) continue;  // lower triangle; the diagonal is hit once per (s, s)
        const double pt = rows->coeff[t].real();
        const double qt = -rows->coeff[t].imag();
        const double v = lre[ui] * ps * pt + lim[ui] * qs * qt - lx[ui] * (ps * qt + qs * pt);
        band.at(cs, ct) += c * v;
      }
    }
  }
  for (Index i = 0; i < n; ++i) band.at(i, i) += rho;
  return band;
}

namespace {

// k unpreconditioned CG steps on N~ z = r from z = 0.
void truncated_cg(const NewtonSystem& sys, double rho, int k, std::span<const double> r,
                  std::span<double> z) {
  const std::size_t n = r.size();
  std::fill(z.begin(), z.end(), 0.0);
  Vector res(r.begin(), r.end());
  Vector p = res;
  Vector q(n);
  double rr = kernels::dot(res, res);
  if (rr == 0.0) return;
  const double stop = rr * 1e-32;
  for (int it = 0; it < k; ++it) {
    sys.preconditioner_matvec(p, rho, q);
    const double pq = kernels::dot(p, q);
    if (!(pq > 0.0)) break;
    const double alpha = rr / pq;
    kernels::axpy(alpha, p, z);
    kernels::axpy(-alpha, q, res);
    const double rr_new = kernels::dot(res, res);
    if (rr_new <= stop) break;
    kernels::xpby(res, rr_new / rr, p);
    rr = rr_new;
  }
}

}  // namespace

Preconditioner Preconditioner::build(const NewtonSystem& sys, double rho, PrecondMode mode) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw std::invalid_argument("rho must be positive");
  if (mode.kind == PrecondKind::truncated_cg && mode.inner_iterations < 1) {
    throw std::invalid_argument("truncated_cg needs at least one inner iteration");
  }
  Preconditioner p(&sys, rho, mode);
  if (mode.kind != PrecondKind::exact_banded) return p;
  for (int attempt = 0; attempt <= 30; ++attempt) {
    try {
      p.factor_ = std::make_shared<const BandCholesky>(assemble_preconditioner_band(sys, p.rho_));
      return p;
    } catch (const std::domain_error&) {
      p.rho_ *= 2.0;
      ++p.rho_doublings_;
    }
  }
  throw SolverAbort("preconditioner factorization failed after repeated rho doubling");
}

void Preconditioner::apply(std::span<const double> in, std::span<double> out) const {
  switch (mode_.kind) {
    case PrecondKind::identity:
      std::copy(in.begin(), in.end(), out.begin());
      return;
    case PrecondKind::exact_banded:
      factor_->solve(in, out);
      return;
    case PrecondKind::truncated_cg:
      truncated_cg(*sys_, rho_, mode_.inner_iterations, in, out);
      return;
  }
}

LinearAction Preconditioner::action() const {
  if (mode_.kind == PrecondKind::identity) return {};
  return [self = *this](std::span<const double> in, std::span<double> out) { self.apply(in, out); };
}

double SpectrumReport::raw_relative_spread() const {
  if (raw_eigs.empty()) return 0.0;
  return (raw_eigs.back() - raw_eigs.front()) / raw_eigs.back();
}

double SpectrumReport::precond_max_deviation() const {
  double m = 0.0;
  for (double v : precond_eigs) m = std::max(m, std::abs(v - 1.0));
  return m;
}

namespace {

Eigen::MatrixXd dense_of(Index n, const std::function<void(std::span<const double>, std::span<double>)>& f) {
  Eigen::MatrixXd m(n, n);
  Vector e(static_cast<std::size_t>(n), 0.0);
  Vector col(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) {
    e[static_cast<std::size_t>(j)] = 1.0;
    f(e, col);
    e[static_cast<std::size_t>(j)] = 0.0;
    for (Index i = 0; i < n; ++i) m(i, j) = col[static_cast<std::size_t>(i)];
  }
  return 0.5 * (m + m.transpose());
}

Vector to_vector(const Eigen::VectorXd& v) { return Vector(v.data(), v.data() + v.size()); }

}  // namespace

SpectrumReport spectrum_report(const NewtonSystem& sys, double rho, double nu, bool preconditioned) {
  const Index n = sys.n();
  if (n > kSpectrumMaxDimension) {
    throw std::invalid_argument("spectrum_report: n = " + std::to_string(n) + " exceeds " +
                                std::to_string(kSpectrumMaxDimension));
  }
  if (!(rho > 0.0) || !(nu > 0.0)) throw std::invalid_argument("rho and nu must be positive");
  const auto& obj = sys.objective();

  SpectrumReport rep;
  rep.rho = rho;
  rep.nu = nu;

  const Eigen::MatrixXd bhat =
      dense_of(n, [&](std::span<const double> v, std::span<double> o) { sys.bhat_matvec(v, o); });
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> raw(bhat, Eigen::EigenvaluesOnly);
  rep.raw_eigs = to_vector(raw.eigenvalues());

  // Split of the dictionary by D_i against nu; Bc = {D_i >= nu}.
  const auto& d = sys.D();
  std::vector<Index> bc;
  for (Index i = 0; i < sys.l(); ++i) {
    if (d[static_cast<std::size_t>(i)] < nu) {
      ++rep.sigma;
    } else {
      bc.push_back(i);
    }
  }
  const CVector wdense = materialize(obj.W());  // n x l, column-major
  Eigen::MatrixXcd wbc(n, static_cast<Index>(bc.size()));
  for (std::size_t k = 0; k < bc.size(); ++k) {
    for (Index r = 0; r < n; ++r) {
      wbc(r, static_cast<Index>(k)) = wdense[static_cast<std::size_t>(bc[k] * n + r)];
    }
  }
  const Eigen::MatrixXd gram = (wbc * wbc.adjoint()).real();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gs(gram, Eigen::EigenvaluesOnly);
  const double gmax = gs.eigenvalues().size() ? gs.eigenvalues().maxCoeff() : 0.0;
  rep.lambda_min_wbc = 0.0;
  for (Index i = 0; i < gs.eigenvalues().size(); ++i) {
    const double ev = gs.eigenvalues()(i);
    if (ev > 1e-10 * std::max(1.0, gmax)) {
      rep.lambda_min_wbc = ev;
      break;
    }
  }

  rep.delta = estimate_delta(obj.A(), 200);
  rep.chi = 1.0 + rep.delta - rho;
  const double num = 0.5 * (rep.chi + 1.0 + std::sqrt(5.0 * rep.chi * rep.chi - 2.0 * rep.chi + 1.0));
  const double c = obj.c();
  const double mu = obj.mu();
  rep.bound = num / (c * mu * mu * nu * nu * nu * rep.lambda_min_wbc + rho);
  rep.bound_kernel = num / rho;

  if (!preconditioned) {
    rep.precond_eigs = rep.raw_eigs;
    return rep;
  }
  const Eigen::MatrixXd ntil = dense_of(
      n, [&](std::span<const double> v, std::span<double> o) { sys.preconditioner_matvec(v, rho, o); });
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ge(bhat, ntil,
                                                               Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (ge.info() != Eigen::Success) {
    throw std::runtime_error("spectrum_report: preconditioner is not positive definite");
  }
  rep.precond_eigs = to_vector(ge.eigenvalues());
  // Eigenvectors of N^{-1/2} B^ N^{-1/2} are u = N^{1/2} v for the
  // generalized eigenvectors v.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ns(ntil);
  const Eigen::MatrixXd nhalf = ns.operatorSqrt();
  const Eigen::MatrixXcd wbc_adj = wbc.adjoint();
  for (Index k = 0; k < n; ++k) {
    const Eigen::VectorXd u = (nhalf * ge.eigenvectors().col(k)).normalized();
    if (bc.empty() || (wbc_adj * u.cast<Complex>()).norm() <= 1e-8) ++rep.eigvecs_in_kernel;
  }
  return rep;
}

std::string spectrum_csv(const SpectrumReport& report) {
  std::ostringstream os;
  os.precision(17);
  os << "index,raw,preconditioned\n";
  const std::size_t n = std::max(report.raw_eigs.size(), report.precond_eigs.size());
  for (std::size_t i = 0; i < n; ++i) {
    os << i << ',';
    if (i < report.raw_eigs.size()) os << report.raw_eigs[i];
    os << ',';
    if (i < report.precond_eigs.size()) os << report.precond_eigs[i];
    os << '\n';
  }
  return os.str();
}

}  // namespace pdncg
