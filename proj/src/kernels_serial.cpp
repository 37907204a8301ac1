#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pdncg/kernels.hpp"

namespace pdncg::kernels::serial {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void xpby(std::span<const double> x, double beta, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + beta * y[i];
}

void gradient2d_analysis(std::span<const double> x, Index n1, Index n2,
                         std::span<Complex> y) {
  for (Index j = 0; j < n2; ++j) {
    for (Index i = 0; i < n1; ++i) {
      const Index k = i + n1 * j;
      const double h = (j + 1 < n2) ? x[k + n1] - x[k] : 0.0;
      const double v = (i + 1 < n1) ? x[k + 1] - x[k] : 0.0;
      y[k] = Complex(h, v);
    }
  }
}

void gradient2d_synthesis(std::span<const Complex> z, Index n1, Index n2,
                          std::span<Complex> out) {
  const Complex im(0.0, 1.0);
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
  for (Index j = 0; j < n2; ++j) {
    for (Index i = 0; i < n1; ++i) {
      const Index k = i + n1 * j;
      double s = 0.0;
      if (j + 1 < n2) s -= z[k].real();
      if (i + 1 < n1) s -= z[k].imag();
      if (j > 0) s += z[k - n1].real();
      if (i > 0) s += z[k - 1].imag();
      out[k] = s;
    }
  }
}

void fwht(std::span<double> x) {
  const std::size_t n = x.size();
  for (std::size_t h = 1; h < n; h <<= 1) {
    for (std::size_t start = 0; start < n; start += 2 * h) {
      for (std::size_t i = start; i < start + h; ++i) {
        const double a = x[i];
        const double b = x[i + h];
        x[i] = a + b;
        x[i + h] = a - b;
      }
    }
  }
}

void huber_diagonal(std::span<const Complex> y, double mu, std::span<double> d) {
  const double mu2 = mu * mu;
  for (std::size_t i = 0; i < y.size(); ++i) d[i] = 1.0 / std::sqrt(mu2 + std::norm(y[i]));
}

}  // namespace pdncg::kernels::serial
