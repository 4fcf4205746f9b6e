#pragma once

#include <functional>
#include <span>
#include <vector>

namespace stabletree::stats {

double mean(std::span<const double> x);
/// Sample standard deviation (n - 1 denominator).
double stddev(std::span<const double> x);
/// Standard error of the mean.
double standard_error(std::span<const double> x);

/// Quantile with linear interpolation between order statistics, q in [0, 1].
double quantile(std::vector<double> x, double q);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  /// Ordinary least-squares standard error of the slope.
  double slope_stderr = 0.0;
};

/// Least squares y = intercept + slope * x. Needs at least two distinct x.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

/// sup_x |F_n(x) - F(x)| of a sample against a continuous CDF.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);

/// Asymptotic Kolmogorov p-value P(D_n >= d), with Stephens' small-sample
/// correction of the argument.
double ks_pvalue(double d, std::size_t n);

/// Critical value of D_n at level `level` (inverse of ks_pvalue).
double ks_critical(std::size_t n, double level);

}  // namespace stabletree::stats
