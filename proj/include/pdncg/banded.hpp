#pragma once

#include <span>

#include "pdncg/types.hpp"

namespace pdncg {

/// Symmetric band matrix, lower triangle stored row by row: entry (i, i-d)
/// for d in [0, bandwidth] lives at values[i * (bandwidth + 1) + bandwidth - d]
/// so each stored row is contiguous in column order.
class SymmetricBandMatrix {
 public:
  SymmetricBandMatrix(Index n, Index bandwidth);

  Index n() const { return n_; }
  Index bandwidth() const { return w_; }

  /// Entry (i, j) with |i - j| <= bandwidth; symmetric access.
  double& at(Index i, Index j);
  double at(Index i, Index j) const;

  void multiply(std::span<const double> x, std::span<double> y) const;

 private:
  friend class BandCholesky;
  Index n_;
  Index w_;
  Vector values_;
};

/// L L^T factorization of a symmetric positive-definite band matrix.
class BandCholesky {
 public:
  /// Throws std::domain_error on a nonpositive pivot.
  explicit BandCholesky(const SymmetricBandMatrix& a);

  void solve(std::span<const double> rhs, std::span<double> x) const;
  Index n() const { return n_; }

 private:
  Index n_;
  Index w_;
  Vector l_;  // same layout as SymmetricBandMatrix
};

}  // namespace pdncg
