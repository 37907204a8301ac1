#pragma once

// Preconditioner N~ = c sym(B~) + rho I for the symmetrized Newton system.
// Replacing A^T A by rho I keeps the dominant smoothing term of B^ while
// dropping the expensive measurement part.

#include <memory>
#include <optional>
#include <string>

#include "pdncg/banded.hpp"
#include "pdncg/krylov.hpp"
#include "pdncg/newton_system.hpp"

namespace pdncg {

enum class PrecondKind { identity, exact_banded, truncated_cg };

struct PrecondMode {
  PrecondKind kind = PrecondKind::identity;
  int inner_iterations = 15;  // truncated_cg only

  static PrecondMode identity() { return {PrecondKind::identity, 0}; }
  static PrecondMode exact_banded() { return {PrecondKind::exact_banded, 0}; }
  static PrecondMode truncated_cg(int k = 15) { return {PrecondKind::truncated_cg, k}; }
};

std::string to_string(const PrecondMode& mode);

/// Assemble N~ explicitly in band form. The dictionary must expose its
/// analysis rows (gradient2d, dense). Bandwidth is the widest pixel coupling
/// of any atom (the column stride n1 for gradient2d).
SymmetricBandMatrix assemble_preconditioner_band(const NewtonSystem& sys, double rho);

class Preconditioner {
 public:
  /// Factorization breakdown in exact_banded mode is retried with rho doubled
  /// (at most 30 times); rho_doublings() reports how often that happened.
  static Preconditioner build(const NewtonSystem& sys, double rho, PrecondMode mode);

  /// out ~= N~^{-1} in (exact for identity/exact_banded).
  void apply(std::span<const double> in, std::span<double> out) const;
  LinearAction action() const;

  const PrecondMode& mode() const { return mode_; }
  double rho() const { return rho_; }
  int rho_doublings() const { return rho_doublings_; }
  /// False for truncated_cg: a fixed number of CG steps is not a linear map
  /// of the right-hand side.
  bool is_linear() const { return mode_.kind != PrecondKind::truncated_cg; }

 private:
  Preconditioner(const NewtonSystem* sys, double rho, PrecondMode mode)
      : sys_(sys), rho_(rho), mode_(mode) {}

  const NewtonSystem* sys_;
  double rho_;
  PrecondMode mode_;
  int rho_doublings_ = 0;
  std::shared_ptr<const BandCholesky> factor_;
};

struct SpectrumReport {
  Vector raw_eigs;      // lambda(B^), ascending
  Vector precond_eigs;  // lambda(N~^{-1} B^), ascending
  Index sigma = 0;      // #(D_i < nu)
  double nu = 0.0;
  double delta = 0.0;   // estimate of ||A A^T - I||_2
  double chi = 0.0;     // 1 + delta - rho
  double lambda_min_wbc = 0.0;  // smallest nonzero eigenvalue of Re(W_Bc W_Bc^*)
  double bound = 0.0;           // |lambda - 1| bound, eigenvectors outside Ker(W_Bc^*)
  double bound_kernel = 0.0;    // |lambda - 1| bound, eigenvectors inside Ker(W_Bc^*)
  Index eigvecs_in_kernel = 0;  // count of eigenvectors found in Ker(W_Bc^*)
  double rho = 0.0;

  double raw_relative_spread() const;   // (max - min) / max
  double precond_max_deviation() const; // max |lambda - 1|
};

inline constexpr Index kSpectrumMaxDimension = 4096;

/// Dense spectra of B^ and N~^{-1} B^ at the Newton system `sys`. With
/// `preconditioned == false` the preconditioned spectrum equals the raw one.
/// Rejects n > kSpectrumMaxDimension.
SpectrumReport spectrum_report(const NewtonSystem& sys, double rho, double nu,
                               bool preconditioned = true);

/// Rows "index,raw,preconditioned" with a header line.
std::string spectrum_csv(const SpectrumReport& report);

}  // namespace pdncg
