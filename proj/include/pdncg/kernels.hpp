#pragma once

// Data-parallel inner loops used by the operators and the solver.
//
// Every kernel exists twice: `serial::` is the plain reference loop kept for
// testing, `omp::` is the OpenMP version used in production. Reductions in
// `omp::` are taken over fixed-size blocks whose partial sums are combined in
// block order, so results do not depend on the thread count.

#include <span>

#include "pdncg/types.hpp"

namespace pdncg::kernels {

/// Block length of the deterministic reductions.
inline constexpr Index kReductionBlock = 4096;

namespace serial {

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm_inf(std::span<const double> a);
// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
// y = x + beta * y
void xpby(std::span<const double> x, double beta, std::span<double> y);

// Forward differences of a column-major n1 x n2 image. Output k carries the
// stride-n1 (horizontal) difference in its real part and the stride-1
// (vertical) difference in its imaginary part; trailing differences are 0.
void gradient2d_analysis(std::span<const double> x, Index n1, Index n2,
                         std::span<Complex> y);
// Complex adjoint of the above (maps C^n -> C^n).
void gradient2d_synthesis(std::span<const Complex> z, Index n1, Index n2,
                          std::span<Complex> out);
// Real part of the adjoint.
void gradient2d_synthesis_real(std::span<const Complex> z, Index n1, Index n2,
                               std::span<double> out);

// In-place unnormalized Walsh-Hadamard transform (Sylvester ordering).
void fwht(std::span<double> x);

// D_i = (mu^2 + |y_i|^2)^{-1/2}
void huber_diagonal(std::span<const Complex> y, double mu, std::span<double> d);

}  // namespace serial

namespace omp {

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm_inf(std::span<const double> a);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void xpby(std::span<const double> x, double beta, std::span<double> y);

void gradient2d_analysis(std::span<const double> x, Index n1, Index n2,
                         std::span<Complex> y);
void gradient2d_synthesis(std::span<const Complex> z, Index n1, Index n2,
                          std::span<Complex> out);
void gradient2d_synthesis_real(std::span<const Complex> z, Index n1, Index n2,
                               std::span<double> out);

void fwht(std::span<double> x);

void huber_diagonal(std::span<const Complex> y, double mu, std::span<double> d);

}  // namespace omp

// Production entry points.
using omp::axpy;
using omp::dot;
using omp::fwht;
using omp::gradient2d_analysis;
using omp::gradient2d_synthesis;
using omp::gradient2d_synthesis_real;
using omp::huber_diagonal;
using omp::norm2;
using omp::norm_inf;
using omp::xpby;

}  // namespace pdncg::kernels
