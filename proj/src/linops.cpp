#include "pdncg/linops.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <string>

#include "pdncg/kernels.hpp"
#include "pdncg/random.hpp"

namespace pdncg {

namespace {

void check_size(std::size_t got, Index want, const char* what) {
  if (static_cast<Index>(got) != want) {
    throw std::invalid_argument(std::string(what) + ": expected length " + std::to_string(want) +
                                ", got " + std::to_string(got));
  }
}

bool is_power_of_two(Index n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

// ---------------------------------------------------------------------------
// LinearOperator

LinearOperator::LinearOperator(Index rows, Index cols, Field field)
    : rows_(rows), cols_(cols), field_(field) {
  if (rows <= 0 || cols <= 0) throw std::invalid_argument("operator dimensions must be positive");
}

void LinearOperator::apply(std::span<const Complex> x, std::span<Complex> y) const {
  check_size(x.size(), cols_, "apply input");
  check_size(y.size(), rows_, "apply output");
  count();
  do_apply(x, y);
}

void LinearOperator::adjoint(std::span<const Complex> y, std::span<Complex> x) const {
  check_size(y.size(), rows_, "adjoint input");
  check_size(x.size(), cols_, "adjoint output");
  count();
  do_adjoint(y, x);
}

void LinearOperator::apply(std::span<const double> x, std::span<double> y) const {
  if (!is_real()) throw std::logic_error("real apply on a complex operator");
  check_size(x.size(), cols_, "apply input");
  check_size(y.size(), rows_, "apply output");
  count();
  do_apply_real(x, y);
}

void LinearOperator::adjoint(std::span<const double> y, std::span<double> x) const {
  if (!is_real()) throw std::logic_error("real adjoint on a complex operator");
  check_size(y.size(), rows_, "adjoint input");
  check_size(x.size(), cols_, "adjoint output");
  count();
  do_adjoint_real(y, x);
}

void LinearOperator::analysis(std::span<const double> x, std::span<Complex> y) const {
  check_size(x.size(), rows_, "analysis input");
  check_size(y.size(), cols_, "analysis output");
  count();
  do_analysis(x, y);
}

void LinearOperator::synthesis_real(std::span<const Complex> z, std::span<double> x) const {
  check_size(z.size(), cols_, "synthesis input");
  check_size(x.size(), rows_, "synthesis output");
  count();
  do_synthesis_real(z, x);
}

Vector LinearOperator::apply(const Vector& x) const {
  Vector y(static_cast<std::size_t>(rows_));
  apply(std::span<const double>(x), std::span<double>(y));
  return y;
}

Vector LinearOperator::adjoint(const Vector& y) const {
  Vector x(static_cast<std::size_t>(cols_));
  adjoint(std::span<const double>(y), std::span<double>(x));
  return x;
}

CVector LinearOperator::apply(const CVector& x) const {
  CVector y(static_cast<std::size_t>(rows_));
  apply(std::span<const Complex>(x), std::span<Complex>(y));
  return y;
}

CVector LinearOperator::adjoint(const CVector& y) const {
  CVector x(static_cast<std::size_t>(cols_));
  adjoint(std::span<const Complex>(y), std::span<Complex>(x));
  return x;
}

CVector LinearOperator::analysis(const Vector& x) const {
  CVector y(static_cast<std::size_t>(cols_));
  analysis(std::span<const double>(x), std::span<Complex>(y));
  return y;
}

Vector LinearOperator::synthesis_real(const CVector& z) const {
  Vector x(static_cast<std::size_t>(rows_));
  synthesis_real(std::span<const Complex>(z), std::span<double>(x));
  return x;
}

void LinearOperator::do_apply(std::span<const Complex> x, std::span<Complex> y) const {
  if (!is_real()) throw std::logic_error("complex operator must implement do_apply");
  Vector re(x.size()), im(x.size()), yr(y.size()), yi(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    re[i] = x[i].real();
    im[i] = x[i].imag();
  }
  do_apply_real(re, yr);
  do_apply_real(im, yi);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = Complex(yr[i], yi[i]);
}

void LinearOperator::do_adjoint(std::span<const Complex> y, std::span<Complex> x) const {
  if (!is_real()) throw std::logic_error("complex operator must implement do_adjoint");
  Vector re(y.size()), im(y.size()), xr(x.size()), xi(x.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    re[i] = y[i].real();
    im[i] = y[i].imag();
  }
  do_adjoint_real(re, xr);
  do_adjoint_real(im, xi);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = Complex(xr[i], xi[i]);
}

void LinearOperator::do_apply_real(std::span<const double> x, std::span<double> y) const {
  CVector xc(x.begin(), x.end());
  CVector yc(y.size());
  do_apply(xc, yc);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = yc[i].real();
}

void LinearOperator::do_adjoint_real(std::span<const double> y, std::span<double> x) const {
  CVector yc(y.begin(), y.end());
  CVector xc(x.size());
  do_adjoint(yc, xc);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = xc[i].real();
}

void LinearOperator::do_analysis(std::span<const double> x, std::span<Complex> y) const {
  if (is_real()) {
    Vector yr(y.size());
    do_adjoint_real(x, yr);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = yr[i];
    return;
  }
  CVector xc(x.begin(), x.end());
  do_adjoint(xc, y);
}

void LinearOperator::do_synthesis_real(std::span<const Complex> z, std::span<double> x) const {
  if (is_real()) {
    // Re(M z) = M Re(z) for a real M.
    Vector zr(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) zr[i] = z[i].real();
    do_apply_real(zr, x);
    return;
  }
  CVector xc(x.size());
  do_apply(z, xc);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = xc[i].real();
}

// ---------------------------------------------------------------------------
// SamplingMask

SamplingMask::SamplingMask(std::vector<Index> selected, Index n, std::uint64_t seed)
    : selected_(std::move(selected)), n_(n), seed_(seed) {
  if (n <= 0) throw std::invalid_argument("mask universe must be positive");
  for (std::size_t i = 0; i < selected_.size(); ++i) {
    if (selected_[i] < 0 || selected_[i] >= n) throw std::invalid_argument("mask index out of range");
    if (i > 0 && selected_[i] <= selected_[i - 1]) {
      throw std::invalid_argument("mask indices must be strictly increasing");
    }
  }
}

namespace {

// Partial Fisher-Yates over [first, n): the first m slots of the shuffled
// pool are the sample.
std::vector<Index> draw_without_replacement(Index first, Index n, Index m, Rng& rng) {
  std::vector<Index> pool(static_cast<std::size_t>(n - first));
  std::iota(pool.begin(), pool.end(), first);
  const auto size = static_cast<std::uint64_t>(pool.size());
  for (std::uint64_t i = 0; i < static_cast<std::uint64_t>(m); ++i) {
    const std::uint64_t j = i + rng.below(size - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(static_cast<std::size_t>(m));
  return pool;
}

}  // namespace

SamplingMask SamplingMask::random(Index n, Index m, std::uint64_t seed) {
  if (m < 0 || m > n) throw std::invalid_argument("mask size must lie in [0, n]");
  Rng rng(seed);
  auto idx = draw_without_replacement(0, n, m, rng);
  std::sort(idx.begin(), idx.end());
  return SamplingMask(std::move(idx), n, seed);
}

SamplingMask SamplingMask::random_with_dc(Index n, Index m, std::uint64_t seed) {
  if (m < 1 || m > n) throw std::invalid_argument("mask size must lie in [1, n]");
  Rng rng(seed);
  auto idx = draw_without_replacement(1, n, m - 1, rng);
  idx.push_back(0);
  std::sort(idx.begin(), idx.end());
  return SamplingMask(std::move(idx), n, seed);
}

SamplingMask SamplingMask::full(Index n) {
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  return SamplingMask(std::move(idx), n, 0);
}

// ---------------------------------------------------------------------------
// Concrete operators

namespace {

class Gradient2D final : public LinearOperator {
 public:
  Gradient2D(Index n1, Index n2) : LinearOperator(n1 * n2, n1 * n2, Field::complex), n1_(n1), n2_(n2) {}

  std::optional<SparseAnalysis> analysis_rows() const override {
    SparseAnalysis s;
    s.n = rows();
    s.l = cols();
    s.row_ptr.reserve(static_cast<std::size_t>(s.l + 1));
    s.row_ptr.push_back(0);
    const Complex im(0.0, 1.0);
    for (Index j = 0; j < n2_; ++j) {
      for (Index i = 0; i < n1_; ++i) {
        const Index k = i + n1_ * j;
        Complex self = 0.0;
        if (j + 1 < n2_) self -= 1.0;
        if (i + 1 < n1_) self -= im;
        if (self != Complex(0.0)) {
          s.col.push_back(k);
          s.coeff.push_back(self);
        }
        if (i + 1 < n1_) {
          s.col.push_back(k + 1);
          s.coeff.push_back(im);
        }
        if (j + 1 < n2_) {
          s.col.push_back(k + n1_);
          s.coeff.push_back(1.0);
        }
        s.row_ptr.push_back(static_cast<Index>(s.col.size()));
      }
    }
    return s;
  }

 protected:
  void do_apply(std::span<const Complex> z, std::span<Complex> out) const override {
    kernels::gradient2d_synthesis(z, n1_, n2_, out);
  }

  void do_adjoint(std::span<const Complex> x, std::span<Complex> y) const override {
    const Complex im(0.0, 1.0);
    for (Index j = 0; j < n2_; ++j) {
      for (Index i = 0; i < n1_; ++i) {
        const Index k = i + n1_ * j;
        const Complex h = (j + 1 < n2_) ? x[k + n1_] - x[k] : Complex(0.0);
        const Complex v = (i + 1 < n1_) ? x[k + 1] - x[k] : Complex(0.0);
        y[k] = h + im * v;
      }
    }
  }

  void do_analysis(std::span<const double> x, std::span<Complex> y) const override {
    kernels::gradient2d_analysis(x, n1_, n2_, y);
  }

  void do_synthesis_real(std::span<const Complex> z, std::span<double> x) const override {
    kernels::gradient2d_synthesis_real(z, n1_, n2_, x);
  }

 private:
  Index n1_;
  Index n2_;
};

// FFTW's planner is not thread-safe; execution with new arrays is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

class PartialDct2 final : public LinearOperator {
 public:
  PartialDct2(Index n1, Index n2, const SamplingMask& mask)
      : LinearOperator(mask.size(), n1 * n2, Field::real), n1_(n1), n2_(n2), mask_(mask.indices()) {
    const Index n = n1 * n2;
    scale_fwd_.resize(static_cast<std::size_t>(n));
    scale_inv_.resize(static_cast<std::size_t>(n));
    for (Index j = 0; j < n2; ++j) {
      for (Index i = 0; i < n1; ++i) {
        const double f1 = i == 0 ? std::sqrt(1.0 / (4.0 * n1)) : std::sqrt(1.0 / (2.0 * n1));
        const double f2 = j == 0 ? std::sqrt(1.0 / (4.0 * n2)) : std::sqrt(1.0 / (2.0 * n2));
        const double g1 = i == 0 ? std::sqrt(1.0 / n1) : 1.0 / std::sqrt(2.0 * n1);
        const double g2 = j == 0 ? std::sqrt(1.0 / n2) : 1.0 / std::sqrt(2.0 * n2);
        scale_fwd_[static_cast<std::size_t>(i + n1 * j)] = f1 * f2;
        scale_inv_[static_cast<std::size_t>(i + n1 * j)] = g1 * g2;
      }
    }
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    double* buf = fftw_alloc_real(static_cast<std::size_t>(n));
    // Column-major n1 x n2 is row-major n2 x n1 for FFTW.
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward_ = fftw_plan_r2r_2d(static_cast<int>(n2), static_cast<int>(n1), buf, buf, FFTW_REDFT10,
                                FFTW_REDFT10, flags);
    inverse_ = fftw_plan_r2r_2d(static_cast<int>(n2), static_cast<int>(n1), buf, buf, FFTW_REDFT01,
                                FFTW_REDFT01, flags);
    fftw_free(buf);
    if (forward_ == nullptr || inverse_ == nullptr) throw std::runtime_error("FFTW planning failed");
  }

  ~PartialDct2() override {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(inverse_);
  }

  PartialDct2(const PartialDct2&) = delete;
  PartialDct2& operator=(const PartialDct2&) = delete;

 protected:
  void do_apply_real(std::span<const double> x, std::span<double> y) const override {
    Vector work(x.begin(), x.end());
    fftw_execute_r2r(forward_, work.data(), work.data());
    for (std::size_t r = 0; r < mask_.size(); ++r) {
      const auto k = static_cast<std::size_t>(mask_[r]);
      y[r] = work[k] * scale_fwd_[k];
    }
  }

  void do_adjoint_real(std::span<const double> y, std::span<double> x) const override {
    std::fill(x.begin(), x.end(), 0.0);
    for (std::size_t r = 0; r < mask_.size(); ++r) {
      const auto k = static_cast<std::size_t>(mask_[r]);
      x[k] = y[r] * scale_inv_[k];
    }
    fftw_execute_r2r(inverse_, x.data(), x.data());
  }

 private:
  Index n1_;
  Index n2_;
  std::vector<Index> mask_;
  Vector scale_fwd_;
  Vector scale_inv_;
  fftw_plan forward_ = nullptr;
  fftw_plan inverse_ = nullptr;
};

class PartialWalsh01 final : public LinearOperator {
 public:
  PartialWalsh01(Index n, const SamplingMask& mask)
      : LinearOperator(mask.size(), n, Field::real), mask_(mask.indices()) {}

 protected:
  // (H + 1)/2 x = H x / 2 + (1^T x) / 2
  void do_apply_real(std::span<const double> x, std::span<double> y) const override {
    Vector work(x.begin(), x.end());
    double total = 0.0;
    for (double v : x) total += v;
    kernels::fwht(work);
    for (std::size_t r = 0; r < mask_.size(); ++r) {
      y[r] = 0.5 * work[static_cast<std::size_t>(mask_[r])] + 0.5 * total;
    }
  }

  void do_adjoint_real(std::span<const double> y, std::span<double> x) const override {
    std::fill(x.begin(), x.end(), 0.0);
    double total = 0.0;
    for (std::size_t r = 0; r < mask_.size(); ++r) {
      x[static_cast<std::size_t>(mask_[r])] = y[r];
      total += y[r];
    }
    kernels::fwht(x);
    for (auto& v : x) v = 0.5 * v + 0.5 * total;
  }

 private:
  std::vector<Index> mask_;
};

class DenseOperator final : public LinearOperator {
 public:
  DenseOperator(Index rows, Index cols, CVector entries, Field field)
      : LinearOperator(rows, cols, field), entries_(std::move(entries)) {
    if (field == Field::real) {
      real_.resize(entries_.size());
      for (std::size_t i = 0; i < entries_.size(); ++i) real_[i] = entries_[i].real();
    }
  }

  std::optional<SparseAnalysis> analysis_rows() const override {
    SparseAnalysis s;
    s.n = rows();
    s.l = cols();
    s.row_ptr.push_back(0);
    for (Index i = 0; i < cols(); ++i) {
      for (Index j = 0; j < rows(); ++j) {
        const Complex w = std::conj(at(j, i));
        if (w != Complex(0.0)) {
          s.col.push_back(j);
          s.coeff.push_back(w);
        }
      }
      s.row_ptr.push_back(static_cast<Index>(s.col.size()));
    }
    return s;
  }

 protected:
  void do_apply(std::span<const Complex> x, std::span<Complex> y) const override {
    std::fill(y.begin(), y.end(), Complex(0.0));
    for (Index c = 0; c < cols(); ++c) {
      const Complex xc = x[static_cast<std::size_t>(c)];
      for (Index r = 0; r < rows(); ++r) y[static_cast<std::size_t>(r)] += at(r, c) * xc;
    }
  }

  void do_adjoint(std::span<const Complex> y, std::span<Complex> x) const override {
    for (Index c = 0; c < cols(); ++c) {
      Complex s = 0.0;
      for (Index r = 0; r < rows(); ++r) s += std::conj(at(r, c)) * y[static_cast<std::size_t>(r)];
      x[static_cast<std::size_t>(c)] = s;
    }
  }

  void do_apply_real(std::span<const double> x, std::span<double> y) const override {
    std::fill(y.begin(), y.end(), 0.0);
    for (Index c = 0; c < cols(); ++c) {
      const double xc = x[static_cast<std::size_t>(c)];
      const double* colp = real_.data() + c * rows();
      for (Index r = 0; r < rows(); ++r) y[static_cast<std::size_t>(r)] += colp[r] * xc;
    }
  }

  void do_adjoint_real(std::span<const double> y, std::span<double> x) const override {
    for (Index c = 0; c < cols(); ++c) {
      const double* colp = real_.data() + c * rows();
      double s = 0.0;
      for (Index r = 0; r < rows(); ++r) s += colp[r] * y[static_cast<std::size_t>(r)];
      x[static_cast<std::size_t>(c)] = s;
    }
  }

 private:
  Complex at(Index r, Index c) const { return entries_[static_cast<std::size_t>(r + rows() * c)]; }

  CVector entries_;
  Vector real_;
};

}  // namespace

OperatorPtr make_gradient2d(Index n1, Index n2) {
  if (n1 < 2 || n2 < 2) throw std::invalid_argument("gradient2d needs an image of at least 2 x 2");
  return std::make_shared<Gradient2D>(n1, n2);
}

OperatorPtr make_partial_dct2(Index n1, Index n2, const SamplingMask& mask) {
  if (!is_power_of_two(n1) || !is_power_of_two(n2)) {
    throw std::invalid_argument("partial DCT needs power-of-two image dimensions");
  }
  if (mask.universe() != n1 * n2) throw std::invalid_argument("mask universe does not match image size");
  if (mask.size() == 0) throw std::invalid_argument("empty sampling mask");
  return std::make_shared<PartialDct2>(n1, n2, mask);
}

OperatorPtr make_partial_walsh01(Index n, const SamplingMask& mask) {
  if (!is_power_of_two(n)) throw std::invalid_argument("Walsh transform needs a power-of-two length");
  if (mask.universe() != n) throw std::invalid_argument("mask universe does not match length");
  if (mask.size() == 0) throw std::invalid_argument("empty sampling mask");
  return std::make_shared<PartialWalsh01>(n, mask);
}

OperatorPtr make_dense_dictionary(Index rows, Index cols, std::span<const Complex> entries,
                                  Field field) {
  if (rows <= 0 || cols <= 0) throw std::invalid_argument("dense operator dimensions must be positive");
  check_size(entries.size(), rows * cols, "dense entries");
  for (const auto& e : entries) {
    if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) {
      throw std::invalid_argument("dense operator entries must be finite");
    }
    if (field == Field::real && e.imag() != 0.0) {
      throw std::invalid_argument("real dense operator with complex entries");
    }
  }
  return std::make_shared<DenseOperator>(rows, cols, CVector(entries.begin(), entries.end()), field);
}

OperatorPtr make_dense_dictionary(Index rows, Index cols, std::span<const double> entries) {
  CVector c(entries.begin(), entries.end());
  return make_dense_dictionary(rows, cols, c, Field::real);
}

CVector materialize(const LinearOperator& op) {
  const Index rows = op.rows();
  const Index cols = op.cols();
  CVector out(static_cast<std::size_t>(rows * cols));
  CVector e(static_cast<std::size_t>(cols), Complex(0.0));
  CVector col(static_cast<std::size_t>(rows));
  for (Index c = 0; c < cols; ++c) {
    e[static_cast<std::size_t>(c)] = 1.0;
    op.apply(std::span<const Complex>(e), std::span<Complex>(col));
    std::copy(col.begin(), col.end(), out.begin() + c * rows);
    e[static_cast<std::size_t>(c)] = 0.0;
  }
  return out;
}

double estimate_delta(const LinearOperator& a, int iterations) {
  if (!a.is_real()) throw std::invalid_argument("estimate_delta needs a real operator");
  if (iterations < 1) throw std::invalid_argument("estimate_delta needs at least one iteration");
  Rng rng(0x5eedULL);
  Vector v = rng.normal_vector(a.rows());
  const double nv = kernels::norm2(v);
  for (auto& e : v) e /= nv;
  Vector at(static_cast<std::size_t>(a.cols()));
  Vector w(static_cast<std::size_t>(a.rows()));
  double best = 0.0;
  // ||M^k v|| / ||M^{k-1} v|| is nondecreasing in k for symmetric M.
  for (int it = 0; it < iterations; ++it) {
    a.adjoint(std::span<const double>(v), std::span<double>(at));
    a.apply(std::span<const double>(at), std::span<double>(w));
    kernels::axpy(-1.0, v, w);
    const double nw = kernels::norm2(w);
    best = std::max(best, nw);
    if (nw == 0.0) break;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = w[i] / nw;
  }
  return best;
}

}  // namespace pdncg
