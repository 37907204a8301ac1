#include "pdncg/newton_system.hpp"

#include <cmath>

#include "pdncg/kernels.hpp"

namespace pdncg {

namespace {
constexpr Index kParallelThreshold = 8192;
}

NewtonSystem::NewtonSystem(const SmoothedObjective& obj, const Vector& x, const Vector& g_re,
                           const Vector& g_im)
    : obj_(&obj), g_re_(g_re), g_im_(g_im) {
  const Index l = obj.l();
  if (static_cast<Index>(x.size()) != obj.n()) throw std::invalid_argument("x has wrong length");
  if (static_cast<Index>(g_re.size()) != l || static_cast<Index>(g_im.size()) != l) {
    throw std::invalid_argument("dual vectors must have length l");
  }
  const CVector y = obj.W().analysis(x);
  d_ = build_D(y, obj.mu()).values;
  const auto ul = static_cast<std::size_t>(l);
  a_.resize(ul);
  b_.resize(ul);
  lam_re_.resize(ul);
  lam_im_.resize(ul);
  cross_.resize(ul);
  db2_.resize(ul);
  db3_.resize(ul);
#pragma omp parallel for schedule(static) if (l >= kParallelThreshold)
  for (Index k = 0; k < l; ++k) {
    const auto i = static_cast<std::size_t>(k);
    const double di = d_[i];
    const double a = y[i].real();
    const double b = -y[i].imag();
    a_[i] = a;
    b_[i] = b;
    const double b1 = di * g_re_[i] * a;
    const double b2 = di * g_re_[i] * b;
    const double b3 = di * g_im_[i] * a;
    const double b4 = di * g_im_[i] * b;
    lam_re_[i] = di * (1.0 - b1);
    lam_im_[i] = di * (1.0 - b4);
    cross_[i] = 0.5 * di * (b2 + b3);
    db2_[i] = di * b2;
    db3_[i] = di * b3;
  }
}

void NewtonSystem::split_analysis(std::span<const double> v, CVector& pq) const {
  pq.resize(static_cast<std::size_t>(l()));
  obj_->W().analysis(v, pq);
  // W^* v = ReW^T v - i ImW^T v
  for (auto& e : pq) e = Complex(e.real(), -e.imag());
}

void NewtonSystem::combine_synthesis(const CVector& s, std::span<double> out) const {
  // Re(W z) = ReW Re(z) - ImW Im(z), so z = s_re - i s_im.
  CVector z(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) z[i] = Complex(s[i].real(), -s[i].imag());
  obj_->W().synthesis_real(z, out);
}

void NewtonSystem::sym_matvec(std::span<const double> v, std::span<double> out) const {
  CVector pq;
  split_analysis(v, pq);
  const Index l = this->l();
#pragma omp parallel for schedule(static) if (l >= kParallelThreshold)
  for (Index k = 0; k < l; ++k) {
    const auto i = static_cast<std::size_t>(k);
    const double p = pq[i].real();
    const double q = pq[i].imag();
    pq[i] = Complex(lam_re_[i] * p - cross_[i] * q, lam_im_[i] * q - cross_[i] * p);
  }
  combine_synthesis(pq, out);
}

void NewtonSystem::bhat_matvec(std::span<const double> v, std::span<double> out) const {
  sym_matvec(v, out);
  const auto& a = obj_->A();
  Vector av(static_cast<std::size_t>(a.rows()));
  Vector atav(static_cast<std::size_t>(a.cols()));
  a.apply(v, av);
  a.adjoint(av, atav);
  const double c = obj_->c();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = c * out[i] + atav[i];
}

void NewtonSystem::preconditioner_matvec(std::span<const double> v, double rho,
                                         std::span<double> out) const {
  sym_matvec(v, out);
  const double c = obj_->c();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = c * out[i] + rho * v[i];
}

std::pair<Vector, Vector> NewtonSystem::dual_step(const Vector& dx) const {
  CVector pq;
  split_analysis(dx, pq);
  const auto ul = static_cast<std::size_t>(l());
  Vector dg_re(ul), dg_im(ul);
  for (std::size_t i = 0; i < ul; ++i) {
    const double p = pq[i].real();
    const double q = pq[i].imag();
    dg_re[i] = lam_re_[i] * p - db2_[i] * q - g_re_[i] + d_[i] * a_[i];
    dg_im[i] = lam_im_[i] * q - db3_[i] * p - g_im_[i] + d_[i] * b_[i];
  }
  return {std::move(dg_re), std::move(dg_im)};
}

Vector bhat_matvec(const SmoothedObjective& obj, const Vector& x, const Vector& g_re,
                   const Vector& g_im, const Vector& v) {
  NewtonSystem sys(obj, x, g_re, g_im);
  Vector out(v.size());
  sys.bhat_matvec(v, out);
  return out;
}

std::pair<Vector, Vector> dual_step(const SmoothedObjective& obj, const Vector& x,
                                    const Vector& g_re, const Vector& g_im, const Vector& dx) {
  return NewtonSystem(obj, x, g_re, g_im).dual_step(dx);
}

CVector project_linf(std::span<const Complex> u) {
  CVector v(u.begin(), u.end());
  for (auto& e : v) {
    const double m = std::abs(e);
    if (m > 1.0) e /= m;
  }
  return v;
}

void project_linf(Vector& re, Vector& im) {
  for (std::size_t i = 0; i < re.size(); ++i) {
    const double m = std::hypot(re[i], im[i]);
    if (m > 1.0) {
      re[i] /= m;
      im[i] /= m;
    }
  }
}

}  // namespace pdncg
