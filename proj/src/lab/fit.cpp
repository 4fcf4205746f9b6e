#include "stabletree/lab/fit.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "stabletree/errors.hpp"
#include "stabletree/lab/csv.hpp"
#include "stabletree/rng.hpp"
#include "stabletree/stats.hpp"

namespace stabletree::lab {

nlohmann::json to_json(const FitReport& r) {
  return {{"slope", r.slope},
          {"intercept", r.intercept},
          {"stderr", r.std_error},
          {"window", {r.window_lo, r.window_hi}},
          {"r_squared", r.r_squared},
          {"points", r.points},
          {"plateau_spread", r.plateau_spread},
          {"plateau_max_deviation", r.plateau_max_deviation},
          {"ratio_min", r.ratio_min},
          {"ratio_max", r.ratio_max}};
}

namespace {

constexpr double kSlack = 1e-9;

std::vector<std::size_t> window_indices(std::span<const double> x, double lo, double hi) {
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] >= lo * (1 - kSlack) && x[j] <= hi * (1 + kSlack)) idx.push_back(j);
  }
  return idx;
}

std::vector<double> column_mean(const std::vector<std::vector<double>>& rows, const std::vector<std::size_t>& which,
                                std::size_t width) {
  std::vector<double> m(width, 0.0);
  for (std::size_t r : which) {
    for (std::size_t j = 0; j < width; ++j) m[j] += rows[r][j];
  }
  for (double& v : m) v /= static_cast<double>(which.size());
  return m;
}

stats::LinearFit log_fit(std::span<const double> x, std::span<const double> y, const std::vector<std::size_t>& idx) {
  std::vector<double> lx, ly;
  for (std::size_t j : idx) {
    if (!(y[j] > 0.0)) throw WindowError("non-positive mean inside the fit window");
    lx.push_back(std::log(x[j]));
    ly.push_back(std::log(y[j]));
  }
  return stats::linear_fit(lx, ly);
}

}  // namespace

FitReport fit_power_law(std::span<const double> x, const std::vector<std::vector<double>>& samples, double lo,
                        double hi, std::size_t bootstrap, std::uint64_t seed) {
  if (samples.empty()) throw ParameterError("power-law fit needs at least one sample");
  for (const auto& s : samples) {
    if (s.size() != x.size()) throw ParameterError("sample length differs from the abscissa");
  }
  const std::vector<std::size_t> idx = window_indices(x, lo, hi);
  if (idx.size() < 2) throw WindowError("fewer than two grid points in the fit window");
  FitReport r;
  r.window_lo = lo;
  r.window_hi = hi;
  r.points = idx.size();
  std::vector<std::size_t> all(samples.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const std::vector<double> mean = column_mean(samples, all, x.size());
  const stats::LinearFit f = log_fit(x, mean, idx);
  r.slope = f.slope;
  r.intercept = f.intercept;
  r.r_squared = f.r_squared;
  r.std_error = f.slope_stderr;
  if (samples.size() > 1 && bootstrap > 0) {
    Rng rng = make_rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, samples.size() - 1);
    std::vector<std::size_t> which(samples.size());
    std::vector<double> slopes;
    for (std::size_t b = 0; b < bootstrap; ++b) {
      for (auto& w : which) w = pick(rng);
      slopes.push_back(log_fit(x, column_mean(samples, which, x.size()), idx).slope);
    }
    r.std_error = stats::stddev(slopes);
  }
  return r;
}

std::pair<double, double> default_counting_window(const SizeBlock& block) {
  if (block.lambdas.empty()) throw WindowError("empty lambda grid");
  const std::vector<double> mean = mean_dirichlet(block);
  const double hi = block.lambdas.back() / 10.0;
  double lo = hi;
  for (std::size_t j = 0; j < mean.size(); ++j) {
    if (mean[j] >= 10.0) {
      lo = block.lambdas[j];
      break;
    }
  }
  return {lo, hi};
}

FitReport fit_counting_slope(const SizeBlock& block, double gamma, double lo, double hi, std::size_t bootstrap,
                             std::uint64_t seed) {
  if (lo <= 0.0 || hi <= 0.0) {
    const auto w = default_counting_window(block);
    if (lo <= 0.0) lo = w.first;
    if (hi <= 0.0) hi = w.second;
  }
  if (!(hi > lo) || std::log10(hi / lo) < 2.0 - kSlack) {
    throw WindowError("counting fit window [" + format_double(lo) + ", " + format_double(hi) +
                      "] spans fewer than two decades");
  }
  const std::vector<double> mean = mean_dirichlet(block);
  const std::vector<std::size_t> idx = window_indices(block.lambdas, lo, hi);
  if (idx.empty()) throw WindowError("no grid point in the counting fit window");
  if (mean[idx.front()] < 10.0) {
    throw WindowError("mean count " + format_double(mean[idx.front()]) + " at the window's low end is below 10");
  }
  std::vector<std::vector<double>> rows;
  for (const ReplicateResult& r : block.replicates) {
    rows.emplace_back(r.curve.dirichlet.begin(), r.curve.dirichlet.end());
  }
  FitReport f = fit_power_law(block.lambdas, rows, lo, hi, bootstrap, seed);
  std::vector<double> ratio;
  for (std::size_t j : idx) ratio.push_back(mean[j] / std::pow(block.lambdas[j], gamma));
  const auto [mn, mx] = std::minmax_element(ratio.begin(), ratio.end());
  const double m = stats::mean(ratio);
  f.plateau_spread = (*mx - *mn) / m;
  f.plateau_max_deviation = std::max(*mx / m - 1.0, 1.0 - *mn / m);
  return f;
}

std::pair<double, double> default_heat_window(const SizeBlock& block, std::pair<double, double> counting) {
  if (block.ts.empty()) throw WindowError("no heat traces in the dataset");
  const std::vector<double> mean = mean_heat(block);
  double lo = 0.0, hi = 0.0;
  for (std::size_t j = 0; j < block.ts.size(); ++j) {
    bool clean = true;
    for (const ReplicateResult& r : block.replicates) clean = clean && r.heat_bound[j] <= 0.01 * r.heat[j];
    const double t = block.ts[j];
    if (!clean || mean[j] < 10.0) continue;
    if (t < 1.0 / counting.second * (1 - kSlack) || t > 1.0 / counting.first * (1 + kSlack)) continue;
    if (lo == 0.0) lo = t;
    hi = t;
  }
  if (lo == 0.0) throw WindowError("no t satisfies the heat window conditions");
  return {lo, hi};
}

FitReport fit_heat_slope(const SizeBlock& block, double gamma, double c_hat, double lo, double hi,
                         std::size_t bootstrap, std::uint64_t seed) {
  const std::vector<std::size_t> idx = window_indices(block.ts, lo, hi);
  if (idx.size() < 2) throw WindowError("fewer than two t values in the heat fit window");
  std::vector<std::vector<double>> rows;
  for (const ReplicateResult& r : block.replicates) {
    for (std::size_t j : idx) {
      if (r.heat_bound[j] > 0.01 * r.heat[j]) {
        throw InsufficientSpectrum("heat trace truncation bound above 1% at t=" + format_double(block.ts[j]) +
                                   " (seed " + std::to_string(r.seed) + ")");
      }
    }
    rows.push_back(r.heat);
  }
  FitReport f = fit_power_law(block.ts, rows, lo, hi, bootstrap, seed);
  const std::vector<double> mean = mean_heat(block);
  const double denom = c_hat * std::tgamma(1.0 + gamma);
  f.ratio_min = std::numeric_limits<double>::infinity();
  f.ratio_max = -std::numeric_limits<double>::infinity();
  for (std::size_t j : idx) {
    const double ratio = mean[j] * std::pow(block.ts[j], gamma) / denom;
    f.ratio_min = std::min(f.ratio_min, ratio);
    f.ratio_max = std::max(f.ratio_max, ratio);
  }
  return f;
}

MInfinityEstimate counting_constant(const SizeBlock& block, const StableParams& params,
                                    std::pair<double, double> window, std::uint64_t seed) {
  std::vector<std::vector<std::int64_t>> curves;
  for (const ReplicateResult& r : block.replicates) curves.push_back(r.curve.dirichlet);
  return m_infinity_estimate(block.lambdas, curves, params, std::max(window.first, window.second / 10.0),
                             window.second, 1000, seed);
}

void residual_export(std::ostream& os, const Dataset& data, double c_hat) {
  CsvRow(os) << "alpha" << "n" << "replicate" << "seed" << "lambda" << "N_dirichlet" << "residual";
  const double alpha = data.config.alpha;
  const double gamma = alpha / (2.0 * alpha - 1.0);
  const double second = 1.0 / (2.0 * alpha - 1.0);
  for (const SizeBlock& b : data.blocks) {
    for (const ReplicateResult& r : b.replicates) {
      for (std::size_t j = 0; j < r.curve.lambdas.size(); ++j) {
        const double lambda = r.curve.lambdas[j];
        const double nd = static_cast<double>(r.curve.dirichlet[j]);
        CsvRow(os) << alpha << b.n << r.replicate << r.seed << lambda << r.curve.dirichlet[j]
                   << (nd - c_hat * std::pow(lambda, gamma)) / std::pow(lambda, second);
      }
    }
  }
}

}  // namespace stabletree::lab
