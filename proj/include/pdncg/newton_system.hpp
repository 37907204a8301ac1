#pragma once

// The symmetrized primal-dual Newton system at a point (x, g_re, g_im).
//
// With a = ReW^T x, b = ImW^T x (so W^* x = a - i b) and D from the
// pseudo-Huber smoothing, the diagonal couplings are
//
//   B1 = D g_re a,  B2 = D g_re b,  B3 = D g_im a,  B4 = D g_im b.
//
// sym(B~) v = ReW [D(1-B1) p - E q] + ImW [D(1-B4) q - E p],
//   p = ReW^T v, q = ImW^T v, E = D (B2 + B3) / 2,
//
// B^ = c sym(B~) + A^T A and the preconditioner N~ = c sym(B~) + rho I.
// The cross terms carry a minus sign: that is the linearization of
// D^{-1} g = W^T x, and the only choice for which B^ equals the Hessian of
// f at the central duals g = D W^T x.

#include <utility>

#include "pdncg/smoothing.hpp"
#include "pdncg/types.hpp"

namespace pdncg {

class NewtonSystem {
 public:
  NewtonSystem(const SmoothedObjective& obj, const Vector& x, const Vector& g_re,
               const Vector& g_im);

  const SmoothedObjective& objective() const { return *obj_; }
  Index n() const { return obj_->n(); }
  Index l() const { return obj_->l(); }

  /// sym(B~) v
  void sym_matvec(std::span<const double> v, std::span<double> out) const;
  /// B^ v = c sym(B~) v + A^T A v
  void bhat_matvec(std::span<const double> v, std::span<double> out) const;
  /// N~ v = c sym(B~) v + rho v
  void preconditioner_matvec(std::span<const double> v, double rho, std::span<double> out) const;

  /// Dual directions for a primal direction dx.
  std::pair<Vector, Vector> dual_step(const Vector& dx) const;

  const Vector& D() const { return d_; }
  const Vector& re_wt_x() const { return a_; }
  const Vector& im_wt_x() const { return b_; }
  /// Per-atom coefficients of sym(B~): D(1-B1), D(1-B4), E.
  const Vector& coeff_re() const { return lam_re_; }
  const Vector& coeff_im() const { return lam_im_; }
  const Vector& coeff_cross() const { return cross_; }

 private:
  // p + i q -> (ReW^T v, ImW^T v) packed as complex (p, q)
  void split_analysis(std::span<const double> v, CVector& pq) const;
  // out = ReW s_re + ImW s_im
  void combine_synthesis(const CVector& s, std::span<double> out) const;

  const SmoothedObjective* obj_;
  Vector g_re_;
  Vector g_im_;
  Vector d_;
  Vector a_;
  Vector b_;
  Vector lam_re_;
  Vector lam_im_;
  Vector cross_;
  Vector db2_;
  Vector db3_;
};

/// Free-function forms used by tests and diagnostics.
Vector bhat_matvec(const SmoothedObjective& obj, const Vector& x, const Vector& g_re,
                   const Vector& g_im, const Vector& v);
std::pair<Vector, Vector> dual_step(const SmoothedObjective& obj, const Vector& x,
                                    const Vector& g_re, const Vector& g_im, const Vector& dx);

/// Componentwise projection onto {|u_i| <= 1}: min(1/|u_i|, 1) * u_i.
CVector project_linf(std::span<const Complex> u);
/// In-place projection of a split complex vector (re, im).
void project_linf(Vector& re, Vector& im);

}  // namespace pdncg
