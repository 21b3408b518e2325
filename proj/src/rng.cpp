#include "rng.hpp"

#include <cmath>
#include <string>

#include "errors.hpp"
#include "special.hpp"

namespace bnbar {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = mix64(base);
  s = mix64(s ^ mix64(a + 0x632be59bd9b4e019ull));
  s = mix64(s ^ mix64(b + 0x9e6c63d0876a9a62ull));
  return s;
}

double RngStream::uniform() {
  for (;;) {
    const double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    if (u > 0.0) return u;
  }
}

double RngStream::normal() {
  for (;;) {
    const double v1 = 2.0 * uniform() - 1.0;
    const double v2 = 2.0 * uniform() - 1.0;
    const double s = v1 * v1 + v2 * v2;
    if (s < 1.0 && s > 0.0) return v1 * std::sqrt(-2.0 * std::log(s) / s);
  }
}

double RngStream::gamma(double shape, double scale) {
  if (shape < 1.0) {
    const double u = uniform();
    return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v * scale;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v * scale;
  }
}

double RngStream::beta(double a, double b) {
  for (;;) {
    const double x = gamma(a, 1.0);
    const double y = gamma(b, 1.0);
    if (x + y > 0.0) return x / (x + y);
  }
}

long long RngStream::poisson(double mean) {
  if (mean > 1e15)
    throw numeric_error("poisson mean " + std::to_string(mean) +
                        " too large for exact integer sampling");
  if (mean < 10.0) {
    // multiply uniforms until the product drops under exp(-mean)
    const double limit = std::exp(-mean);
    long long k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > limit);
    return k - 1;
  }
  // Hormann's PTRS rejection, valid for mean >= 10
  const double slam = std::sqrt(mean);
  const double llam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = uniform() - 0.5;
    const double v = uniform();
    const double us = 0.5 - std::fabs(u);
    const long long k =
        static_cast<long long>(std::floor((2.0 * a / us + b) * u + mean + 0.43));
    if (us >= 0.07 && v <= vr) return k;
    if (k < 0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        static_cast<double>(k) * llam - mean - log_gamma(static_cast<double>(k) + 1.0)) {
      return k;
    }
  }
}

}  // namespace bnbar
