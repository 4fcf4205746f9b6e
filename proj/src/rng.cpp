#include "stabletree/rng.hpp"

#include <cmath>

#include "stabletree/errors.hpp"

namespace stabletree {

double GridCollision::suggested_lambda() const noexcept {
  return lambda_ + 1e-12 * (1.0 + std::fabs(lambda_));
}

double uniform_open(Rng& rng) {
  // 53 random bits, shifted off zero.
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double sample_log_gamma(Rng& rng, double shape) {
  if (!(shape > 0.0)) throw ParameterError("gamma shape must be positive");
  if (shape >= 1.0) {
    std::gamma_distribution<double> g(shape, 1.0);
    return std::log(g(rng));
  }
  // G(shape) = G(shape + 1) * U^(1/shape)
  std::gamma_distribution<double> g(shape + 1.0, 1.0);
  const double lg = std::log(g(rng));
  return lg + std::log(uniform_open(rng)) / shape;
}

double sample_beta(Rng& rng, double a, double b) {
  const double lx = sample_log_gamma(rng, a);
  const double ly = sample_log_gamma(rng, b);
  // x / (x + y) = 1 / (1 + exp(ly - lx))
  const double r = ly - lx;
  if (r > 0) {
    const double e = std::exp(-r);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(r));
}

}  // namespace stabletree
