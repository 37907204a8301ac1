#include "pdncg/banded.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pdncg {

SymmetricBandMatrix::SymmetricBandMatrix(Index n, Index bandwidth)
    : n_(n), w_(bandwidth), values_(static_cast<std::size_t>(n * (bandwidth + 1)), 0.0) {
  if (n <= 0 || bandwidth < 0) throw std::invalid_argument("invalid band matrix shape");
}

double& SymmetricBandMatrix::at(Index i, Index j) {
  if (j > i) std::swap(i, j);
  if (i - j > w_) throw std::out_of_range("entry outside band");
  return values_[static_cast<std::size_t>(i * (w_ + 1) + w_ - (i - j))];
}

double SymmetricBandMatrix::at(Index i, Index j) const {
  if (j > i) std::swap(i, j);
  if (i - j > w_) return 0.0;
  return values_[static_cast<std::size_t>(i * (w_ + 1) + w_ - (i - j))];
}

void SymmetricBandMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  std::fill(y.begin(), y.end(), 0.0);
  for (Index i = 0; i < n_; ++i) {
    const double* row = values_.data() + i * (w_ + 1);
    const Index j0 = std::max<Index>(0, i - w_);
    double s = row[w_] * x[static_cast<std::size_t>(i)];
    for (Index j = j0; j < i; ++j) {
      const double aij = row[w_ - (i - j)];
      s += aij * x[static_cast<std::size_t>(j)];
      y[static_cast<std::size_t>(j)] += aij * x[static_cast<std::size_t>(i)];
    }
    y[static_cast<std::size_t>(i)] += s;
  }
}

BandCholesky::BandCholesky(const SymmetricBandMatrix& a) : n_(a.n_), w_(a.w_), l_(a.values_) {
  const Index stride = w_ + 1;
  for (Index i = 0; i < n_; ++i) {
    double* li = l_.data() + i * stride;
    const Index j0 = std::max<Index>(0, i - w_);
    for (Index j = j0; j <= i; ++j) {
      double* lj = l_.data() + j * stride;
      const Index k0 = std::max<Index>(j0, j - w_);
      double s = li[w_ - (i - j)];
      // row i, column k sits at li[w - (i - k)]; row j likewise.
      const double* pi = li + (w_ - (i - k0));
      const double* pj = lj + (w_ - (j - k0));
      const Index len = j - k0;
      for (Index t = 0; t < len; ++t) s -= pi[t] * pj[t];
      if (j < i) {
        li[w_ - (i - j)] = s / lj[w_];
      } else {
        if (!(s > 0.0) || !std::isfinite(s)) {
          throw std::domain_error("band Cholesky: nonpositive pivot at row " + std::to_string(i));
        }
        li[w_] = std::sqrt(s);
      }
    }
  }
}

void BandCholesky::solve(std::span<const double> rhs, std::span<double> x) const {
  const Index stride = w_ + 1;
  Vector z(rhs.begin(), rhs.end());
  for (Index i = 0; i < n_; ++i) {
    const double* li = l_.data() + i * stride;
    const Index k0 = std::max<Index>(0, i - w_);
    double s = z[static_cast<std::size_t>(i)];
    for (Index k = k0; k < i; ++k) s -= li[w_ - (i - k)] * z[static_cast<std::size_t>(k)];
    z[static_cast<std::size_t>(i)] = s / li[w_];
  }
  for (Index i = n_ - 1; i >= 0; --i) {
    const double* li = l_.data() + i * stride;
    const double xi = z[static_cast<std::size_t>(i)] / li[w_];
    z[static_cast<std::size_t>(i)] = xi;
    const Index k0 = std::max<Index>(0, i - w_);
    for (Index k = k0; k < i; ++k) z[static_cast<std::size_t>(k)] -= li[w_ - (i - k)] * xi;
  }
  std::copy(z.begin(), z.end(), x.begin());
}

}  // namespace pdncg
