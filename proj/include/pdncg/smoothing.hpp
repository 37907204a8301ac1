#pragma once

// Pseudo-Huber smoothing of c * ||W^* x||_1 and the smoothed objective
//
//   f(x) = c * psi_mu(W^* x) + 1/2 ||A x - b||^2,
//   psi_mu(y) = sum_i sqrt(mu^2 + |y_i|^2) - mu.
//
// All Hessian actions are matrix-free: intermediates live in the dictionary
// domain (length l) and no l x l or n x n matrix is formed.

#include <span>

#include "pdncg/linops.hpp"
#include "pdncg/types.hpp"

namespace pdncg {

/// D_i = (mu^2 + |y_i|^2)^{-1/2}, so 0 < D_i <= 1/mu.
struct HuberDiagonal {
  Vector values;
};

double huber_value(std::span<const Complex> y, double mu);
HuberDiagonal build_D(std::span<const Complex> y, double mu);

/// Gradient of x -> psi_mu(W^* x): Re(W (D .* W^* x)).
Vector grad_psi(const Vector& x, const LinearOperator& w, double mu);

/// Hessian action of x -> psi_mu(W^* x) on v:
/// 1/2 Re(W (Yhat .* u + Ytilde .* conj(u))), u = W^* v,
/// Yhat_i = mu^2 D_i^3 + D_i, Ytilde_i = -y_i^2 D_i^3 (complex square).
Vector hess_psi_matvec(const Vector& x, const Vector& v, const LinearOperator& w, double mu);

class SmoothedObjective {
 public:
  SmoothedObjective(double c, double mu, OperatorPtr a, OperatorPtr w, Vector b);

  double c() const { return c_; }
  double mu() const { return mu_; }
  const LinearOperator& A() const { return *a_; }
  const LinearOperator& W() const { return *w_; }
  const OperatorPtr& A_ptr() const { return a_; }
  const OperatorPtr& W_ptr() const { return w_; }
  const Vector& b() const { return b_; }

  Index n() const { return a_->cols(); }
  Index m() const { return a_->rows(); }
  Index l() const { return w_->cols(); }

  /// Same operators and data, new (c, mu).
  SmoothedObjective with_parameters(double c, double mu) const;

 private:
  double c_;
  double mu_;
  OperatorPtr a_;
  OperatorPtr w_;
  Vector b_;
};

double objective_value(const SmoothedObjective& obj, const Vector& x);
Vector objective_grad(const SmoothedObjective& obj, const Vector& x);
/// (c * Hess psi + A^T A) v at x.
Vector hess_f_matvec(const SmoothedObjective& obj, const Vector& x, const Vector& v);

}  // namespace pdncg
