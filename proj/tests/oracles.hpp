#pragma once

// Dense reference computations used as independent oracles in the tests.
// Everything here works on explicit matrices built from textbook formulas,
// not on the library's matrix-free code paths.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>

#include "pdncg/linops.hpp"
#include "pdncg/random.hpp"

namespace oracle {

using pdncg::Complex;
using pdncg::Index;
using pdncg::Vector;
using MatC = Eigen::MatrixXcd;
using MatR = Eigen::MatrixXd;
using VecR = Eigen::VectorXd;
using VecC = Eigen::VectorXcd;

inline VecR to_eigen(const Vector& v) { return Eigen::Map<const VecR>(v.data(), static_cast<Index>(v.size())); }
inline Vector to_std(const VecR& v) { return Vector(v.data(), v.data() + v.size()); }

inline MatC dense(const pdncg::LinearOperator& op) {
  const auto entries = pdncg::materialize(op);
  return Eigen::Map<const MatC>(entries.data(), op.rows(), op.cols());
}

/// 1D orthonormal DCT-II matrix, C(k, j) = s_k cos(pi (2j + 1) k / (2n)).
inline MatR dct_matrix(Index n) {
  MatR c(n, n);
  for (Index k = 0; k < n; ++k) {
    const double s = k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
    for (Index j = 0; j < n; ++j) {
      c(k, j) = s * std::cos(std::numbers::pi * (2.0 * j + 1.0) * k / (2.0 * n));
    }
  }
  return c;
}

/// Full 2D DCT of a column-major n1 x n2 image: kron(C_{n2}, C_{n1}).
inline MatR dct2_matrix(Index n1, Index n2) {
  const MatR c1 = dct_matrix(n1);
  const MatR c2 = dct_matrix(n2);
  MatR k(n1 * n2, n1 * n2);
  for (Index a = 0; a < n2; ++a)
    for (Index b = 0; b < n2; ++b) k.block(a * n1, b * n1, n1, n1) = c2(a, b) * c1;
  return k;
}

/// Sylvester Hadamard matrix of order n (power of two).
inline MatR hadamard(Index n) {
  MatR h(1, 1);
  h(0, 0) = 1.0;
  while (h.rows() < n) {
    const Index s = h.rows();
    MatR g(2 * s, 2 * s);
    g << h, h, h, -h;
    h = g;
  }
  return h;
}

/// Dense W^* of the forward-difference gradient, row k = pixel k:
/// (x[k+n1] - x[k]) + i (x[k+1] - x[k]), zero across trailing boundaries.
inline MatC gradient_analysis_matrix(Index n1, Index n2) {
  const Index n = n1 * n2;
  MatC g = MatC::Zero(n, n);
  const Complex im(0.0, 1.0);
  for (Index j = 0; j < n2; ++j) {
    for (Index i = 0; i < n1; ++i) {
      const Index k = i + n1 * j;
      if (j + 1 < n2) {
        g(k, k + n1) += 1.0;
        g(k, k) -= 1.0;
      }
      if (i + 1 < n1) {
        g(k, k + 1) += im;
        g(k, k) -= im;
      }
    }
  }
  return g;
}

/// psi_mu(W^* x) as an explicit sum.
inline double huber(const MatC& wstar, const VecR& x, double mu) {
  const VecC y = wstar * x.cast<Complex>();
  double s = 0.0;
  for (Index i = 0; i < y.size(); ++i) s += std::sqrt(mu * mu + std::norm(y(i))) - mu;
  return s;
}

/// Dense Hessian of psi_mu(W^* x) from the real 2x2 block form: with
/// y = a - i b (a = P x, b = Q x), each atom contributes
/// [P; Q]^T (H_i) [P; Q] with H_i = D^3 [[mu^2 + b^2, -a b], [-a b, mu^2 + a^2]].
inline MatR huber_hessian(const MatC& wstar, const VecR& x, double mu) {
  const Index n = wstar.cols();
  const MatR p = wstar.real();
  const MatR q = -wstar.imag();
  const VecR a = p * x;
  const VecR b = q * x;
  MatR h = MatR::Zero(n, n);
  for (Index i = 0; i < wstar.rows(); ++i) {
    const double d = 1.0 / std::sqrt(mu * mu + a(i) * a(i) + b(i) * b(i));
    const double d3 = d * d * d;
    const VecR pi = p.row(i).transpose();
    const VecR qi = q.row(i).transpose();
    h += d3 * ((mu * mu + b(i) * b(i)) * pi * pi.transpose() + (mu * mu + a(i) * a(i)) * qi * qi.transpose() -
               a(i) * b(i) * (pi * qi.transpose() + qi * pi.transpose()));
  }
  return h;
}

inline VecR huber_gradient(const MatC& wstar, const VecR& x, double mu) {
  const MatR p = wstar.real();
  const MatR q = -wstar.imag();
  const VecR a = p * x;
  const VecR b = q * x;
  VecR g = VecR::Zero(x.size());
  for (Index i = 0; i < wstar.rows(); ++i) {
    const double d = 1.0 / std::sqrt(mu * mu + a(i) * a(i) + b(i) * b(i));
    g += d * (a(i) * p.row(i).transpose() + b(i) * q.row(i).transpose());
  }
  return g;
}

/// Damped Newton on f = c psi + 1/2 ||A x - b||^2 with dense Hessians and an
/// Armijo backtracking line search; stops when ||grad|| <= tol.
inline VecR damped_newton(const MatC& wstar, const MatR& a, const VecR& b, double c, double mu,
                          double tol, int max_iter = 500) {
  VecR x = VecR::Zero(a.cols());
  auto f = [&](const VecR& z) { return c * huber(wstar, z, mu) + 0.5 * (a * z - b).squaredNorm(); };
  for (int it = 0; it < max_iter; ++it) {
    const VecR g = c * huber_gradient(wstar, x, mu) + a.transpose() * (a * x - b);
    if (g.norm() <= tol) break;
    const MatR h = c * huber_hessian(wstar, x, mu) + a.transpose() * a;
    const VecR dx = h.ldlt().solve(-g);
    double t = 1.0;
    const double f0 = f(x);
    while (f(x + t * dx) > f0 + 1e-4 * t * g.dot(dx) && t > 1e-12) t *= 0.5;
    x += t * dx;
  }
  return x;
}

inline MatR random_matrix(Index rows, Index cols, std::uint64_t seed) {
  pdncg::Rng rng(seed);
  MatR m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

inline double rel(const VecR& a, const VecR& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

}  // namespace oracle
