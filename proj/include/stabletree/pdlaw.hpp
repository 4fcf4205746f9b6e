#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "stabletree/rng.hpp"

namespace stabletree {

/// Two-parameter Poisson-Dirichlet law PD(a, theta).
struct PDParams {
  double a = 0.5;
  double theta = 0.5;

  /// PD(1/alpha, 1 - 1/alpha): the law of the spinal split masses of an alpha-stable tree.
  static PDParams stable(double alpha);
  void validate() const;

  /// Parameter of the i-th stick (1-based): Beta(1 - a, theta + i a).
  double stick_beta_b(std::size_t i) const { return theta + static_cast<double>(i) * a; }
  double stick_mean(std::size_t i) const { return (1.0 - a) / (1.0 + theta + (static_cast<double>(i) - 1.0) * a); }
};

/// alpha together with the exponents of the counting asymptotics.
struct StableParams {
  double alpha = 1.5;
  double gamma = 0.75;  ///< alpha / (2 alpha - 1): leading counting exponent
  double beta = 0.25;   ///< (alpha - 1) / (2 alpha - 1): renewal gap exponent

  static StableParams from_alpha(double alpha);

  /// Mean of the renewal measure, (2 alpha - 1) / (alpha - 1).
  double renewal_mean() const { return 1.0 / beta; }
  /// Spectral dimension 2 alpha / (2 alpha - 1).
  double spectral_dimension() const { return 2.0 * gamma; }
  PDParams pd() const { return PDParams::stable(alpha); }
};

struct TruncationPolicy {
  double tolerance = 1e-8;
  std::size_t max_sticks = std::size_t{1} << 22;
  /// When the stick budget runs out first, keep the residual as an explicit
  /// remainder (with its tail law) instead of raising TruncationFailure.
  bool carry_on_cap = false;
};

/// Ranked masses of a (truncated) PD sample. The truncated tail has mass
/// `remainder` and, rescaled to unit mass, is distributed as GEM(a, tail_theta).
struct PDWeights {
  PDParams params;
  std::vector<double> weights;  ///< non-increasing
  double remainder = 0.0;
  double tail_theta = 0.0;
  std::uint64_t seed = 0;

  double total() const;
};

/// Stick-breaking output in generation (size-biased) order.
struct StickBreaking {
  std::vector<double> fractions;  ///< W_i ~ Beta(1 - a, theta + i a)
  std::vector<double> pieces;     ///< W_i * prod_{j<i} (1 - W_j)
  double remainder = 1.0;
};

StickBreaking break_sticks(const PDParams& params, const TruncationPolicy& policy, Rng& rng);

/// GEM stick-breaking until the residual drops below policy.tolerance, then
/// size-ranked. Throws TruncationFailure if max_sticks is hit first (unless
/// the policy carries the remainder).
PDWeights sample_pd(const PDParams& params, const TruncationPolicy& policy, std::uint64_t seed);

/// sum_i E[Delta_i^x] for PD(1/alpha, 1 - 1/alpha); +infinity when x <= 1/alpha.
double psi(const StableParams& params, double x);

/// Derivative of psi in x.
double psi_derivative(const StableParams& params, double x);

/// E sum_i f(V_i) for V ~ PD(a, theta), by quadrature of f(v)/v against the
/// Beta(1 - a, theta + a) law of a size-biased pick. At the stable instance
/// this is ((alpha-1)/alpha) * int_0^1 f(v) v^(-1-1/alpha) dv.
double pd_intensity(const PDParams& params, const std::function<double(double)>& f);

/// Same, restricted to masses in [lo, hi].
double pd_intensity(const PDParams& params, const std::function<double(double)>& f, double lo, double hi);

/// Normalizing constant of the two-pick formula.
double two_pick_constant(const PDParams& params);

/// E sum_{i != j} f(V_i) g(V_j) by 2-D quadrature of the two size-biased picks.
double two_pick_expectation(const PDParams& params, const std::function<double(double)>& f,
                            const std::function<double(double)>& g);

// Monte-Carlo helpers over truncated samples. The tail beyond the sampled
// sticks is completed by drawing its first two size-biased picks, which keeps
// every estimator unbiased whatever the truncation level.

/// Unbiased estimate of sum_i f(V_i) for the full (untruncated) sequence.
double completed_sum(const PDWeights& w, const std::function<double(double)>& f, Rng& rng);

/// Unbiased estimate of sum_{i != j} f(V_i) g(V_j) for the full sequence.
double completed_pair_sum(const PDWeights& w, const std::function<double(double)>& f,
                          const std::function<double(double)>& g, Rng& rng);

/// One size-biased pick (P(pick = V_i) = V_i), exact including the tail.
double size_biased_pick(const PDWeights& w, Rng& rng);

}  // namespace stabletree
