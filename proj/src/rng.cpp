#include "sigdetect/rng.hpp"

namespace sigdetect {

std::uint64_t Stream::next_poisson(double lambda) {
  if (lambda <= 0.0) return 0;
  if (lambda < 30.0) {
    // Knuth: multiply uniforms until the product drops below exp(-lambda).
    const double limit = std::exp(-lambda);
    double prod = 1.0;
    std::uint64_t k = 0;
    for (;;) {
      prod *= next_uniform();
      if (prod <= limit) return k;
      ++k;
    }
  }
  // PTRS (Hormann 1993), exact for lambda >= 10; we switch at 30.
  const double b = 0.931 + 2.53 * std::sqrt(lambda);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_lambda = std::log(lambda);
  for (;;) {
    double u = next_uniform() - 0.5;
    double v = next_uniform();
    double us = 0.5 - std::fabs(u);
    double kf = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
    double rhs = kf * log_lambda - lambda - std::lgamma(kf + 1.0);
    if (lhs <= rhs) return static_cast<std::uint64_t>(kf);
  }
}

}  // namespace sigdetect
