// Serial reference kernels against their OpenMP versions.

#include <benchmark/benchmark.h>

#include "pdncg/kernels.hpp"
#include "pdncg/random.hpp"

namespace k = pdncg::kernels;
using pdncg::Complex;
using pdncg::Index;

namespace {

std::vector<double> data(Index n, std::uint64_t seed) { return pdncg::Rng(seed).normal_vector(n); }

std::vector<Complex> cdata(Index n, std::uint64_t seed) {
  pdncg::Rng rng(seed);
  std::vector<Complex> z(static_cast<std::size_t>(n));
  for (auto& v : z) v = Complex(rng.normal(), rng.normal());
  return z;
}

template <double (*F)(std::span<const double>, std::span<const double>)>
void BM_dot(benchmark::State& st) {
  const auto a = data(st.range(0), 1), b = data(st.range(0), 2);
  for (auto _ : st) benchmark::DoNotOptimize(F(a, b));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <void (*F)(double, std::span<const double>, std::span<double>)>
void BM_axpy(benchmark::State& st) {
  const auto x = data(st.range(0), 1);
  auto y = data(st.range(0), 2);
  for (auto _ : st) {
    F(1e-9, x, y);
    benchmark::ClobberMemory();
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <void (*F)(std::span<const double>, Index, Index, std::span<Complex>)>
void BM_gradient2d(benchmark::State& st) {
  const Index side = st.range(0);
  const auto x = data(side * side, 1);
  std::vector<Complex> y(static_cast<std::size_t>(side * side));
  for (auto _ : st) {
    F(x, side, side, y);
    benchmark::ClobberMemory();
  }
  st.SetItemsProcessed(st.iterations() * side * side);
}

template <void (*F)(std::span<double>)>
void BM_fwht(benchmark::State& st) {
  auto x = data(st.range(0), 1);
  for (auto _ : st) {
    F(x);
    benchmark::ClobberMemory();
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <void (*F)(std::span<const Complex>, double, std::span<double>)>
void BM_huber_diagonal(benchmark::State& st) {
  const auto y = cdata(st.range(0), 1);
  std::vector<double> d(y.size());
  for (auto _ : st) {
    F(y, 1e-5, d);
    benchmark::ClobberMemory();
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

}  // namespace

BENCHMARK(BM_dot<k::serial::dot>)->Name("dot/serial")->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_dot<k::omp::dot>)->Name("dot/omp")->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_axpy<k::serial::axpy>)->Name("axpy/serial")->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_axpy<k::omp::axpy>)->Name("axpy/omp")->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_gradient2d<k::serial::gradient2d_analysis>)->Name("gradient2d/serial")->Arg(256)->Arg(1024);
BENCHMARK(BM_gradient2d<k::omp::gradient2d_analysis>)->Name("gradient2d/omp")->Arg(256)->Arg(1024);
BENCHMARK(BM_fwht<k::serial::fwht>)->Name("fwht/serial")->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_fwht<k::omp::fwht>)->Name("fwht/omp")->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_huber_diagonal<k::serial::huber_diagonal>)->Name("huber_diagonal/serial")->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_huber_diagonal<k::omp::huber_diagonal>)->Name("huber_diagonal/omp")->Arg(1 << 16)->Arg(1 << 20);

BENCHMARK_MAIN();
