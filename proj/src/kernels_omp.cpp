#include <omp.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "pdncg/kernels.hpp"

namespace pdncg::kernels::omp {

namespace {

// Loops shorter than this stay on the calling thread.
constexpr Index kParallelThreshold = 8192;

// Sums per-block partials in block order so the result is independent of
// how blocks were distributed across threads.
template <class BlockFn>
double blocked_reduce(Index n, BlockFn&& block_sum) {
  const Index blocks = (n + kReductionBlock - 1) / kReductionBlock;
  if (blocks <= 1) return n > 0 ? block_sum(Index{0}, n) : 0.0;
  std::vector<double> partial(static_cast<std::size_t>(blocks));
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
  for (Index b = 0; b < blocks; ++b) {
    const Index lo = b * kReductionBlock;
    const Index hi = std::min(n, lo + kReductionBlock);
    partial[static_cast<std::size_t>(b)] = block_sum(lo, hi);
  }
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  const double* pa = a.data();
  const double* pb = b.data();
  return blocked_reduce(static_cast<Index>(a.size()), [=](Index lo, Index hi) {
    double s = 0.0;
    for (Index i = lo; i < hi; ++i) s += pa[i] * pb[i];
    return s;
  });
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double norm_inf(std::span<const double> a) {
  const Index n = static_cast<Index>(a.size());
  double m = 0.0;
#pragma omp parallel for reduction(max : m) schedule(static) if (n >= kParallelThreshold)
  for (Index i = 0; i < n; ++i) m = std::max(m, std::abs(a[i]));
  return m;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  const Index n = static_cast<Index>(x.size());
  const double* px = x.data();
  double* py = y.data();
#pragma omp parallel for simd schedule(static) if (n >= kParallelThreshold)
  for (Index i = 0; i < n; ++i) py[i] += alpha * px[i];
}

void xpby(std::span<const double> x, double beta, std::span<double> y) {
  const Index n = static_cast<Index>(x.size());
  const double* px = x.data();
  double* py = y.data();
#pragma omp parallel for simd schedule(static) if (n >= kParallelThreshold)
  for (Index i = 0; i < n; ++i) py[i] = px[i] + beta * py[i];
}

void gradient2d_analysis(std::span<const double> x, Index n1, Index n2,
                         std::span<Complex> y) {
#pragma omp parallel for schedule(static) if (n1 * n2 >= kParallelThreshold)
  for (Index j = 0; j < n2; ++j) {
    const double* col = x.data() + n1 * j;
    Complex* out = y.data() + n1 * j;
    const bool last_col = (j + 1 == n2);
    for (Index i = 0; i < n1; ++i) {
      const double h = last_col ? 0.0 : col[i + n1] - col[i];
      const double v = (i + 1 < n1) ? col[i + 1] - col[i] : 0.0;
      out[i] = Complex(h, v);
    }
  }
}

void gradient2d_synthesis(std::span<const Complex> z, Index n1, Index n2,
                          std::span<Complex> out) {
  const Complex im(0.0, 1.0);
#pragma omp parallel for schedule(static) if (n1 * n2 >= kParallelThreshold)
  for (Index j = 0; j < n2; ++j) {
    for (Index i = 0; i < n1; ++i) {
      const Index k = i + n1 * j;
      Complex s = 0.0;
      if (j + 1 < n2) s -= z[k];
      if (i + 1 < n1) s += im * z[k];
      if (j > 0) s += z[k - n1];
      if (i > 0) s -= im * z[k - 1];
      out[k] = s;
    }
  }
}

void gradient2d_synthesis_real(std::span<const Complex> z, Index n1, Index n2,
                               std::span<double> out) {
#pragma omp parallel for schedule(static) if (n1 * n2 >= kParallelThreshold)
  for (Index j = 0; j < n2; ++j) {
    const Complex* zc = z.data() + n1 * j;
    double* o = out.data() + n1 * j;
    const bool last_col = (j + 1 == n2);
    for (Index i = 0; i < n1; ++i) {
      double s = last_col ? 0.0 : -zc[i].real();
      if (i + 1 < n1) s -= zc[i].imag();
      if (j > 0) s += zc[i - n1].real();
      if (i > 0) s += zc[i - 1].imag();
      o[i] = s;
    }
  }
}

void fwht(std::span<double> x) {
  const Index n = static_cast<Index>(x.size());
  double* p = x.data();
  // Stages with h < chunk/2 stay inside independent chunks.
  const Index chunk = std::min<Index>(n, 2048);
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
  for (Index c0 = 0; c0 < n; c0 += chunk) {
    for (Index h = 1; h < chunk; h <<= 1) {
      for (Index start = c0; start < c0 + chunk; start += 2 * h) {
        for (Index i = start; i < start + h; ++i) {
          const double a = p[i];
          const double b = p[i + h];
          p[i] = a + b;
          p[i + h] = a - b;
        }
      }
    }
  }
  for (Index h = chunk; h < n; h <<= 1) {
    const Index blocks = n / (2 * h);
#pragma omp parallel for collapse(2) schedule(static) if (n >= kParallelThreshold)
    for (Index blk = 0; blk < blocks; ++blk) {
      for (Index seg = 0; seg < h; seg += chunk) {
        double* lo = p + blk * 2 * h + seg;
        double* hi = lo + h;
        for (Index i = 0; i < chunk; ++i) {
          const double a = lo[i];
          const double b = hi[i];
          lo[i] = a + b;
          hi[i] = a - b;
        }
      }
    }
  }
}

void huber_diagonal(std::span<const Complex> y, double mu, std::span<double> d) {
  const double mu2 = mu * mu;
  const Index n = static_cast<Index>(y.size());
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
  for (Index i = 0; i < n; ++i) d[i] = 1.0 / std::sqrt(mu2 + std::norm(y[i]));
}

}  // namespace pdncg::kernels::omp
