#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <json.hpp>

#include "stabletree/lab/ensemble.hpp"
#include "stabletree/renewal.hpp"

namespace stabletree::lab {

struct FitReport {
  double slope = 0.0;
  double intercept = 0.0;
  /// Bootstrap standard error over replicates (OLS error for one replicate).
  double std_error = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
  /// Counting fits: (max - min) / mean of lambda^(-gamma) mean N^D in the window.
  double plateau_spread = 0.0;
  /// Counting fits: largest |ratio / mean - 1| over the same window.
  double plateau_max_deviation = 0.0;
  /// Heat fits: extremes of trace t^gamma / (C Gamma(1 + gamma)) in the window.
  double ratio_min = 0.0;
  double ratio_max = 0.0;
};

nlohmann::json to_json(const FitReport& r);

/// Power-law fit of y against x over [lo, hi] on log scales, with a bootstrap
/// over the rows of `samples` (each row one replicate, aligned with x).
FitReport fit_power_law(std::span<const double> x, const std::vector<std::vector<double>>& samples,
                        double lo, double hi, std::size_t bootstrap = 500, std::uint64_t seed = 1);

/// Default counting window: lambda with mean N^D >= 10, excluding the top
/// decade of the grid.
std::pair<double, double> default_counting_window(const SizeBlock& block);

/// Slope of log mean N^D against log lambda. Throws WindowError when the
/// window spans fewer than two decades or the mean count at its low end is
/// below 10.
FitReport fit_counting_slope(const SizeBlock& block, double gamma, double lo = 0.0, double hi = 0.0,
                             std::size_t bootstrap = 500, std::uint64_t seed = 1);

/// Default heat window: t with every replicate's truncation bound below 1%
/// and mean trace at least 10, i.e. the image of the counting window.
std::pair<double, double> default_heat_window(const SizeBlock& block, std::pair<double, double> counting);

/// Slope of log mean trace against log t, plus the ratio
/// trace t^gamma / (c_hat Gamma(1 + gamma)) over the window. Throws
/// InsufficientSpectrum when a truncation bound in the window exceeds 1% of
/// its trace.
FitReport fit_heat_slope(const SizeBlock& block, double gamma, double c_hat, double lo, double hi,
                         std::size_t bootstrap = 500, std::uint64_t seed = 1);

/// m(inf) plateau over the top decade of the counting window.
MInfinityEstimate counting_constant(const SizeBlock& block, const StableParams& params,
                                    std::pair<double, double> window, std::uint64_t seed = 1);

/// (N^D(lambda) - c_hat lambda^gamma) / lambda^(1/(2 alpha - 1)) per replicate
/// and grid point, as CSV with a header. An empty dataset gives the header only.
void residual_export(std::ostream& os, const Dataset& data, double c_hat);

}  // namespace stabletree::lab
