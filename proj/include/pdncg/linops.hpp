#pragma once

// Matrix-free linear operators.
//
// An operator of shape rows x cols maps E^cols -> E^rows through apply() and
// E^rows -> E^cols through adjoint() (conjugate transpose). Measurement
// operators A are real (m x n). Dictionaries W are n x l, real or complex;
// the solver only ever needs the analysis map y = W^* x of a real image x and
// the real part of the synthesis map Re(W z), which get dedicated entry
// points so complex dictionaries can skip the general complex path.
//
// Operators are immutable after construction and safe to share between
// threads.

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "pdncg/types.hpp"

namespace pdncg {

enum class Field { real, complex };

/// Rows of W^* in compressed form: y_i = sum_k coeff[k] * x[col[k]] for
/// k in [row_ptr[i], row_ptr[i+1]).
struct SparseAnalysis {
  Index n = 0;
  Index l = 0;
  std::vector<Index> row_ptr;
  std::vector<Index> col;
  std::vector<Complex> coeff;
};

class LinearOperator {
 public:
  LinearOperator(Index rows, Index cols, Field field);
  virtual ~LinearOperator() = default;

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Field field() const { return field_; }
  bool is_real() const { return field_ == Field::real; }

  /// y = M x, complex vectors.
  void apply(std::span<const Complex> x, std::span<Complex> y) const;
  /// x = M^* y, complex vectors.
  void adjoint(std::span<const Complex> y, std::span<Complex> x) const;

  /// Real-vector actions; the operator must be real.
  void apply(std::span<const double> x, std::span<double> y) const;
  void adjoint(std::span<const double> y, std::span<double> x) const;

  /// y = M^* x for a real x of length rows(); y has length cols().
  void analysis(std::span<const double> x, std::span<Complex> y) const;
  /// x = Re(M z) for z of length cols(); x has length rows().
  void synthesis_real(std::span<const Complex> z, std::span<double> x) const;

  Vector apply(const Vector& x) const;
  Vector adjoint(const Vector& y) const;
  CVector apply(const CVector& x) const;
  CVector adjoint(const CVector& y) const;
  CVector analysis(const Vector& x) const;
  Vector synthesis_real(const CVector& z) const;

  /// Explicit rows of M^* when the operator is sparse (dictionaries with a
  /// stencil or dense entries). Used to assemble banded preconditioners.
  virtual std::optional<SparseAnalysis> analysis_rows() const { return std::nullopt; }

  /// Number of forward/adjoint actions performed so far (diagnostic only).
  std::uint64_t action_count() const { return actions_.load(std::memory_order_relaxed); }

 protected:
  // Real operators implement the real pair; complex operators the complex
  // pair. The defaults route one representation through the other.
  virtual void do_apply(std::span<const Complex> x, std::span<Complex> y) const;
  virtual void do_adjoint(std::span<const Complex> y, std::span<Complex> x) const;
  virtual void do_apply_real(std::span<const double> x, std::span<double> y) const;
  virtual void do_adjoint_real(std::span<const double> y, std::span<double> x) const;
  virtual void do_analysis(std::span<const double> x, std::span<Complex> y) const;
  virtual void do_synthesis_real(std::span<const Complex> z, std::span<double> x) const;

 private:
  void count() const { actions_.fetch_add(1, std::memory_order_relaxed); }

  Index rows_;
  Index cols_;
  Field field_;
  mutable std::atomic<std::uint64_t> actions_{0};
};

using OperatorPtr = std::shared_ptr<const LinearOperator>;

/// Distinct sorted sample positions in [0, n).
class SamplingMask {
 public:
  SamplingMask(std::vector<Index> selected, Index n, std::uint64_t seed = 0);

  /// m distinct indices drawn uniformly without replacement.
  static SamplingMask random(Index n, Index m, std::uint64_t seed);
  /// Like random(), but index 0 is always included.
  static SamplingMask random_with_dc(Index n, Index m, std::uint64_t seed);
  static SamplingMask full(Index n);

  const std::vector<Index>& indices() const { return selected_; }
  Index size() const { return static_cast<Index>(selected_.size()); }
  Index universe() const { return n_; }
  std::uint64_t seed() const { return seed_; }

 private:
  std::vector<Index> selected_;
  Index n_;
  std::uint64_t seed_;
};

/// Isotropic-TV dictionary of an n1 x n2 image stored column-major
/// (pixel (i, j) at index i + n1*j). W^* x carries the horizontal forward
/// difference x(i, j+1) - x(i, j) in the real part and the vertical forward
/// difference x(i+1, j) - x(i, j) in the imaginary part; differences across
/// the trailing boundary are zero. W is square (l = n) and has rank n - 1.
OperatorPtr make_gradient2d(Index n1, Index n2);

/// Row-selection of the orthonormal 2D DCT-II of an n1 x n2 image.
OperatorPtr make_partial_dct2(Index n1, Index n2, const SamplingMask& mask);

/// Selected rows of (H + 1)/2, H the n x n Sylvester-Hadamard matrix.
OperatorPtr make_partial_walsh01(Index n, const SamplingMask& mask);

/// Dense operator from column-major entries (rows x cols).
OperatorPtr make_dense_dictionary(Index rows, Index cols, std::span<const Complex> entries,
                                  Field field);
OperatorPtr make_dense_dictionary(Index rows, Index cols, std::span<const double> entries);

/// Dense column-major materialization (rows x cols), via unit-vector applies.
CVector materialize(const LinearOperator& op);

/// Power-iteration estimate of ||A A^T - I||_2 for a real operator A.
double estimate_delta(const LinearOperator& a, int iterations);

}  // namespace pdncg
