#include "pdncg/problems.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pdncg/random.hpp"

namespace pdncg {

namespace {

struct Ellipse {
  double intensity, a, b, x0, y0, phi_deg;
};

// Modified Shepp-Logan table (Toft): intensity, semi-axes, center, rotation.
constexpr std::array<Ellipse, 10> kPhantom = {{
    {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
    {-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0},
    {-0.2, 0.11, 0.31, 0.22, 0.0, -18.0},
    {-0.2, 0.16, 0.41, -0.22, 0.0, 18.0},
    {0.1, 0.21, 0.25, 0.0, 0.35, 0.0},
    {0.1, 0.046, 0.046, 0.0, 0.1, 0.0},
    {0.1, 0.046, 0.046, 0.0, -0.1, 0.0},
    {0.1, 0.046, 0.023, -0.08, -0.605, 0.0},
    {0.1, 0.023, 0.023, 0.0, -0.606, 0.0},
    {0.1, 0.023, 0.046, 0.06, -0.605, 0.0},
}};

void require_same(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("image dimensions differ");
}

bool is_pow2(Index v) { return v > 0 && (v & (v - 1)) == 0; }

}  // namespace

Image shepp_logan(Index n1, Index n2) {
  if (n1 < 16 || n2 < 16) throw std::invalid_argument("phantom needs at least 16 x 16 pixels");
  Image img{n1, n2, Vector(static_cast<std::size_t>(n1 * n2), 0.0)};
  for (Index j = 0; j < n2; ++j) {
    const double x = (2.0 * static_cast<double>(j) - static_cast<double>(n2)) / static_cast<double>(n2);
    for (Index i = 0; i < n1; ++i) {
      const double y = (static_cast<double>(n1) - 2.0 * static_cast<double>(i)) / static_cast<double>(n1);
      double v = 0.0;
      for (const auto& e : kPhantom) {
        const double phi = e.phi_deg * std::numbers::pi / 180.0;
        const double dx = x - e.x0;
        const double dy = y - e.y0;
        const double u = dx * std::cos(phi) + dy * std::sin(phi);
        const double w = -dx * std::sin(phi) + dy * std::cos(phi);
        if ((u * u) / (e.a * e.a) + (w * w) / (e.b * e.b) <= 1.0) v += e.intensity;
      }
      img.pixels[static_cast<std::size_t>(i + n1 * j)] = std::clamp(v, 0.0, 1.0);
    }
  }
  return img;
}

double psnr(std::span<const double> x, std::span<const double> ref) {
  require_same(x.size(), ref.size());
  if (x.empty()) throw std::invalid_argument("empty image");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - ref[i]) * (x[i] - ref[i]);
  if (s == 0.0) return std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(std::sqrt(static_cast<double>(x.size())) / std::sqrt(s));
}

double psnr(const Image& x, const Image& ref) {
  if (x.n1 != ref.n1 || x.n2 != ref.n2) throw std::invalid_argument("image dimensions differ");
  return psnr(x.pixels, ref.pixels);
}

double relative_error(std::span<const double> x, std::span<const double> ref) {
  require_same(x.size(), ref.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - ref[i]) * (x[i] - ref[i]);
    den += ref[i] * ref[i];
  }
  if (den == 0.0) throw std::invalid_argument("relative error against a zero reference");
  return std::sqrt(num / den);
}

Image add_noise_to_psnr(const Image& image, double target_psnr, std::uint64_t seed) {
  if (std::isinf(target_psnr) && target_psnr > 0.0) return image;
  if (!std::isfinite(target_psnr)) throw std::invalid_argument("target PSNR must be finite or +inf");
  Rng rng(seed);
  Vector e = rng.normal_vector(image.size());
  double norm = 0.0;
  for (double v : e) norm += v * v;
  norm = std::sqrt(norm);
  // ||e|| = sqrt(n) 10^{-psnr/20}
  const double want = std::sqrt(static_cast<double>(image.size())) * std::pow(10.0, -target_psnr / 20.0);
  Image out = image;
  for (std::size_t i = 0; i < e.size(); ++i) out.pixels[i] += e[i] * (want / norm);
  return out;
}

ProblemInstance make_itv_instance(const Image& image, double sampling_ratio, double target_psnr,
                                  std::uint64_t seed) {
  if (!is_pow2(image.n1) || !is_pow2(image.n2)) {
    throw std::invalid_argument("iTV instances need power-of-two image sizes");
  }
  if (!(sampling_ratio > 0.0 && sampling_ratio <= 1.0)) {
    throw std::invalid_argument("sampling ratio must lie in (0, 1]");
  }
  const Index n = image.size();
  const auto m = std::max<Index>(1, static_cast<Index>(std::llround(sampling_ratio * static_cast<double>(n))));
  ProblemInstance p;
  p.n1 = image.n1;
  p.n2 = image.n2;
  p.seed = seed;
  p.W = make_gradient2d(image.n1, image.n2);
  // Distinct streams for the mask and the noise.
  p.A = make_partial_dct2(image.n1, image.n2, SamplingMask::random_with_dc(n, m, seed));
  const Image noisy = add_noise_to_psnr(image, target_psnr, seed ^ 0x9e3779b97f4a7c15ULL);
  p.b = p.A->apply(noisy.pixels);
  p.ground_truth = image.pixels;
  p.noisy = noisy.pixels;
  return p;
}

ProblemInstance make_l1_dense_instance(Index n, Index m, Index k, double noise_level,
                                       std::uint64_t seed) {
  if (n < 1 || m < 1 || k < 0 || k > n) throw std::invalid_argument("invalid l1 instance shape");
  if (!(noise_level >= 0.0)) throw std::invalid_argument("noise level must be nonnegative");
  Rng rng(seed);
  Vector a(static_cast<std::size_t>(m * n));
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  for (auto& v : a) v = scale * rng.normal();
  ProblemInstance p;
  p.n1 = n;
  p.n2 = 1;
  p.seed = seed;
  p.A = make_dense_dictionary(m, n, a);
  Vector id(static_cast<std::size_t>(n * n), 0.0);
  for (Index i = 0; i < n; ++i) id[static_cast<std::size_t>(i * n + i)] = 1.0;
  p.W = make_dense_dictionary(n, n, id);
  Vector x(static_cast<std::size_t>(n), 0.0);
  for (Index t = 0; t < k; ++t) {
    Index pos;
    do {
      pos = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
    } while (x[static_cast<std::size_t>(pos)] != 0.0);
    x[static_cast<std::size_t>(pos)] = rng.normal() >= 0.0 ? 1.0 + rng.uniform() : -1.0 - rng.uniform();
  }
  p.b = p.A->apply(x);
  if (noise_level > 0.0) {
    Vector e = rng.normal_vector(m);
    double en = 0.0, bn = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) {
      en += e[i] * e[i];
      bn += p.b[i] * p.b[i];
    }
    const double s = en > 0.0 ? noise_level * std::sqrt(bn / en) : 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) p.b[i] += s * e[i];
  }
  p.ground_truth = x;
  p.noisy = x;
  return p;
}

}  // namespace pdncg
