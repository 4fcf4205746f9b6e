#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "stabletree/pdlaw.hpp"

namespace stabletree {

/// The discounted intensity nu_gamma(dt) = e^(-gamma t) nu(dt) of the times
/// -ln(Delta_i)/gamma, where nu([0,t]) = sum_i P(Delta_i >= e^(-gamma t)).
/// For the stable split masses it is the Exponential(beta) law.
struct RenewalMeasure {
  StableParams params;
  /// Largest relative deviation seen when the closed form was checked
  /// against quadrature of the defining sums.
  double validation_error = 0.0;

  double density(double t) const;
  double cdf(double t) const;
  /// nu([0, t]) = (alpha - 1) (e^(gamma t / alpha) - 1).
  double raw_cdf(double t) const;
  double mean() const { return 1.0 / params.beta; }
  /// int e^(-lambda s) nu_gamma(ds).
  double laplace(double lambda) const;
};

/// Builds nu_gamma and validates the closed form against intensity
/// quadrature at several t. Throws DerivationFailure if any relative
/// mismatch exceeds 1e-8.
RenewalMeasure nu_gamma(const StableParams& params);

/// nu_gamma([0, t]) computed from the PD intensity: E sum_i Delta_i 1{Delta_i >= e^(-gamma t)}.
double nu_gamma_cdf_from_intensity(const StableParams& params, double t);

/// int t nu_gamma(dt) from the PD intensity: E sum_i Delta_i (-ln Delta_i) / gamma.
double renewal_mean_from_intensity(const StableParams& params);

/// int t nu_gamma(dt) by Gauss-Kronrod quadrature of the density on [0, T],
/// with T chosen so that the neglected tail is below 1e-14.
double renewal_mean_quadrature(const StableParams& params);

/// int e^(-lambda s) nu_gamma(ds) from the PD intensity: E sum_i Delta_i^(1 + lambda/gamma).
double nu_gamma_laplace_from_intensity(const StableParams& params, double lambda);

/// 1 / (1 - psi(1 + lambda/gamma)), lambda > 0.
double laplace_renewal_kernel(const StableParams& params, double lambda);

/// sum_k L^k with L = nu_gamma_laplace_from_intensity(lambda): the same
/// kernel assembled from the renewal series.
double laplace_renewal_kernel_series(const StableParams& params, double lambda);

struct DiscountedMean {
  std::vector<double> grid;
  std::vector<double> m_values;
  std::vector<double> u_values;
  double m_infinity = 0.0;
};

/// Solves m = u * U for the renewal measure U = delta_0 + beta dt of
/// nu_gamma, i.e. m(t) = m(inf) - beta int_t^inf u + u(t) with
/// m(inf) = beta int u, by trapezoidal integration on the given grid.
/// Throws DivergenceError when u is non-finite or has not decayed at the
/// right end of the grid.
DiscountedMean renewal_solve(std::span<const double> grid, std::span<const double> u,
                             const StableParams& params);

struct MInfinityEstimate {
  double value = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  /// (max - min) / mean of lambda^(-gamma) mean N^D over the window.
  double spread = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  std::size_t points = 0;
  std::size_t curves = 0;
  bool converged = true;
  std::string warning;
};

/// Plateau average of lambda^(-gamma) * mean N^D(lambda) over [window_lo,
/// window_hi]; by default the top decade of the grid. The confidence
/// interval is a percentile bootstrap over curves. A relative spread above
/// 25% marks the estimate as not converged.
MInfinityEstimate m_infinity_estimate(std::span<const double> lambdas,
                                      const std::vector<std::vector<std::int64_t>>& curves,
                                      const StableParams& params, double window_lo = 0.0,
                                      double window_hi = 0.0, std::size_t bootstrap = 1000,
                                      std::uint64_t seed = 1);

/// {alpha, gamma, beta, M_inv, m_infinity, ci_low, ci_high, diagnostics}.
nlohmann::json renewal_report(const StableParams& params, const MInfinityEstimate* estimate = nullptr);

}  // namespace stabletree
