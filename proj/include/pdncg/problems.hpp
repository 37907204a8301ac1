#pragma once

// Reproducible test instances and image-quality metrics.
//
// Images are column-major n1 x n2 arrays (n1 rows), values in [0, 1].

#include <cstdint>
#include <limits>
#include <optional>

#include "pdncg/linops.hpp"

namespace pdncg {

struct Image {
  Index n1 = 0;  // rows
  Index n2 = 0;  // columns
  Vector pixels;

  Index size() const { return n1 * n2; }
  double operator()(Index i, Index j) const { return pixels[static_cast<std::size_t>(i + n1 * j)]; }
};

/// Modified (high-contrast) Shepp-Logan phantom, clipped to [0, 1].
/// Row i maps to y = (n1 - 2i)/n1 and column j to x = (2j - n2)/n2.
Image shepp_logan(Index n1, Index n2);

inline constexpr double kNoNoise = std::numeric_limits<double>::infinity();

/// Adds seeded white Gaussian noise rescaled so that psnr(result, image)
/// equals target_psnr. target_psnr = +inf returns the image unchanged.
Image add_noise_to_psnr(const Image& image, double target_psnr, std::uint64_t seed);

/// 20 log10(sqrt(n) / ||x - ref||); +inf for identical images.
double psnr(const Image& x, const Image& ref);
double psnr(std::span<const double> x, std::span<const double> ref);

/// ||x - ref|| / ||ref||; throws for a zero reference.
double relative_error(std::span<const double> x, std::span<const double> ref);

struct ProblemInstance {
  OperatorPtr A;
  OperatorPtr W;
  Vector b;
  Index n1 = 0;
  Index n2 = 0;
  std::optional<Vector> ground_truth;  // clean signal
  std::optional<Vector> noisy;         // signal the measurements were taken from
  std::uint64_t seed = 0;
};

/// iTV instance: W = gradient2d, A = partial DCT2 with m = round(ratio * n)
/// rows (the DC row always included), b = A * noisy image.
ProblemInstance make_itv_instance(const Image& image, double sampling_ratio, double target_psnr,
                                  std::uint64_t seed);

/// l1-analysis instance with W = I (real): dense Gaussian A (m x n, entries
/// N(0, 1/m)), a k-sparse ground truth, and b = A x + noise of norm
/// noise_level * ||A x||.
ProblemInstance make_l1_dense_instance(Index n, Index m, Index k, double noise_level,
                                       std::uint64_t seed);

}  // namespace pdncg
