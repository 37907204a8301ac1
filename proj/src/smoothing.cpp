#include "pdncg/smoothing.hpp"

#include <cmath>
#include <string>

#include "pdncg/kernels.hpp"

namespace pdncg {

namespace {

void require_mu(double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("smoothing parameter mu must be positive");
}

}  // namespace

double huber_value(std::span<const Complex> y, double mu) {
  require_mu(mu);
  const double mu2 = mu * mu;
  double s = 0.0;
  for (const auto& yi : y) {
    // sqrt(mu^2 + t^2) - mu = t^2 / (sqrt(mu^2 + t^2) + mu), without cancellation
    const double t2 = std::norm(yi);
    s += t2 / (std::sqrt(mu2 + t2) + mu);
  }
  return s;
}

HuberDiagonal build_D(std::span<const Complex> y, double mu) {
  require_mu(mu);
  HuberDiagonal d{Vector(y.size())};
  kernels::huber_diagonal(y, mu, d.values);
  return d;
}

Vector grad_psi(const Vector& x, const LinearOperator& w, double mu) {
  require_mu(mu);
  CVector y = w.analysis(x);
  const auto d = build_D(y, mu);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] *= d.values[i];
  return w.synthesis_real(y);
}

Vector hess_psi_matvec(const Vector& x, const Vector& v, const LinearOperator& w, double mu) {
  require_mu(mu);
  const CVector y = w.analysis(x);
  CVector u = w.analysis(v);
  const auto d = build_D(y, mu);
  const double mu2 = mu * mu;
  if (w.is_real()) {
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double di = d.values[i];
      u[i] = mu2 * di * di * di * u[i].real();
    }
  } else {
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double di = d.values[i];
      const double d3 = di * di * di;
      const Complex yhat_u = (mu2 * d3 + di) * u[i];
      const Complex ytilde_ubar = -(y[i] * y[i]) * d3 * std::conj(u[i]);
      u[i] = 0.5 * (yhat_u + ytilde_ubar);
    }
  }
  return w.synthesis_real(u);
}

SmoothedObjective::SmoothedObjective(double c, double mu, OperatorPtr a, OperatorPtr w, Vector b)
    : c_(c), mu_(mu), a_(std::move(a)), w_(std::move(w)), b_(std::move(b)) {
  if (!(c_ > 0.0)) throw std::invalid_argument("regularization weight c must be positive");
  require_mu(mu_);
  if (!a_ || !w_) throw std::invalid_argument("objective needs both A and W");
  if (!a_->is_real()) throw std::invalid_argument("measurement operator A must be real");
  if (a_->cols() != w_->rows()) {
    throw std::invalid_argument("A.cols (" + std::to_string(a_->cols()) + ") != W.rows (" +
                                std::to_string(w_->rows()) + ")");
  }
  if (a_->rows() != static_cast<Index>(b_.size())) {
    throw std::invalid_argument("measurement vector length does not match A.rows");
  }
}

SmoothedObjective SmoothedObjective::with_parameters(double c, double mu) const {
  return SmoothedObjective(c, mu, a_, w_, b_);
}

double objective_value(const SmoothedObjective& obj, const Vector& x) {
  const CVector y = obj.W().analysis(x);
  Vector r = obj.A().apply(x);
  kernels::axpy(-1.0, obj.b(), r);
  return obj.c() * huber_value(y, obj.mu()) + 0.5 * kernels::dot(r, r);
}

Vector objective_grad(const SmoothedObjective& obj, const Vector& x) {
  Vector g = grad_psi(x, obj.W(), obj.mu());
  Vector r = obj.A().apply(x);
  kernels::axpy(-1.0, obj.b(), r);
  const Vector atr = obj.A().adjoint(r);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = obj.c() * g[i] + atr[i];
  return g;
}

Vector hess_f_matvec(const SmoothedObjective& obj, const Vector& x, const Vector& v) {
  Vector h = hess_psi_matvec(x, v, obj.W(), obj.mu());
  const Vector atav = obj.A().adjoint(obj.A().apply(v));
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = obj.c() * h[i] + atav[i];
  return h;
}

}  // namespace pdncg
