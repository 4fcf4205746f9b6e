#include "stabletree/renewal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "stabletree/errors.hpp"
#include "stabletree/quadrature.hpp"
#include "stabletree/rng.hpp"
#include "stabletree/stats.hpp"

namespace stabletree {

double RenewalMeasure::density(double t) const {
  return t < 0.0 ? 0.0 : params.beta * std::exp(-params.beta * t);
}

double RenewalMeasure::cdf(double t) const { return t < 0.0 ? 0.0 : -std::expm1(-params.beta * t); }

double RenewalMeasure::raw_cdf(double t) const {
  if (t < 0.0) return 0.0;
  return (params.alpha - 1.0) * std::expm1(params.gamma * t / params.alpha);
}

double RenewalMeasure::laplace(double lambda) const { return params.beta / (params.beta + lambda); }

double nu_gamma_cdf_from_intensity(const StableParams& params, double t) {
  if (t <= 0.0) return 0.0;
  return pd_intensity(params.pd(), [](double v) { return v; }, std::exp(-params.gamma * t), 1.0);
}

double renewal_mean_from_intensity(const StableParams& params) {
  return pd_intensity(params.pd(), [](double v) { return -v * std::log(v); }) / params.gamma;
}

double renewal_mean_quadrature(const StableParams& params) {
  const double beta = params.beta;
  const double upper = 40.0 / beta;
  return quad::integrate_smooth([beta](double t) { return t * beta * std::exp(-beta * t); }, 0.0, upper,
                                1e-12)
      .value;
}

double nu_gamma_laplace_from_intensity(const StableParams& params, double lambda) {
  const double x = 1.0 + lambda / params.gamma;
  return pd_intensity(params.pd(), [x](double v) { return std::pow(v, x); });
}

RenewalMeasure nu_gamma(const StableParams& params) {
  RenewalMeasure m;
  m.params = StableParams::from_alpha(params.alpha);
  const double ts[] = {0.25, 1.0, 2.0, 4.0, 8.0, 16.0};
  double worst = 0.0;
  for (double t : ts) {
    const double closed = m.cdf(t);
    const double quad = nu_gamma_cdf_from_intensity(m.params, t);
    worst = std::max(worst, std::fabs(quad - closed) / closed);
    const double raw_closed = m.raw_cdf(t);
    const double raw_quad =
        pd_intensity(m.params.pd(), [](double) { return 1.0; }, std::exp(-m.params.gamma * t), 1.0);
    worst = std::max(worst, std::fabs(raw_quad - raw_closed) / raw_closed);
  }
  m.validation_error = worst;
  if (worst > 1e-8) {
    throw DerivationFailure("Exponential(beta) form of nu_gamma disagrees with intensity quadrature: " +
                            std::to_string(worst));
  }
  return m;
}

double laplace_renewal_kernel(const StableParams& params, double lambda) {
  if (!(lambda > 0.0)) throw ParameterError("Laplace kernel needs lambda > 0");
  return 1.0 / (1.0 - psi(params, 1.0 + lambda / params.gamma));
}

double laplace_renewal_kernel_series(const StableParams& params, double lambda) {
  if (!(lambda > 0.0)) throw ParameterError("Laplace kernel needs lambda > 0");
  const double l = nu_gamma_laplace_from_intensity(params, lambda);
  if (!(l < 1.0)) throw DivergenceError("renewal series does not converge");
  double sum = 0.0;
  double term = 1.0;
  for (int k = 0; k < 10'000'000 && term > 1e-17 * sum; ++k) {
    sum += term;
    term *= l;
  }
  return sum;
}

DiscountedMean renewal_solve(std::span<const double> grid, std::span<const double> u, const StableParams& params) {
  if (grid.size() != u.size() || grid.size() < 2) throw ParameterError("renewal grid and u must match, size >= 2");
  double umax = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (j > 0 && !(grid[j] > grid[j - 1])) throw ParameterError("renewal grid must be increasing");
    if (!std::isfinite(u[j])) throw DivergenceError("u is not finite on the grid");
    umax = std::max(umax, std::fabs(u[j]));
  }
  if (std::fabs(u.back()) > 1e-6 * umax) {
    throw DivergenceError("u has not decayed at the end of the grid; the renewal integral diverges");
  }
  DiscountedMean out;
  out.grid.assign(grid.begin(), grid.end());
  out.u_values.assign(u.begin(), u.end());
  out.m_values.resize(grid.size());
  const double beta = params.beta;
  double cumulative = 0.0;
  out.m_values[0] = u[0];
  for (std::size_t j = 1; j < grid.size(); ++j) {
    cumulative += 0.5 * (u[j] + u[j - 1]) * (grid[j] - grid[j - 1]);
    out.m_values[j] = u[j] + beta * cumulative;
  }
  out.m_infinity = beta * cumulative;
  return out;
}

MInfinityEstimate m_infinity_estimate(std::span<const double> lambdas,
                                      const std::vector<std::vector<std::int64_t>>& curves,
                                      const StableParams& params, double window_lo, double window_hi,
                                      std::size_t bootstrap, std::uint64_t seed) {
  if (lambdas.empty() || curves.empty()) throw ParameterError("m_infinity needs a grid and curves");
  for (const auto& c : curves) {
    if (c.size() != lambdas.size()) throw ParameterError("curve length differs from the grid");
  }
  MInfinityEstimate e;
  e.curves = curves.size();
  e.window_hi = window_hi > 0.0 ? window_hi : lambdas.back();
  e.window_lo = window_lo > 0.0 ? window_lo : e.window_hi / 10.0;
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < lambdas.size(); ++j) {
    if (lambdas[j] >= e.window_lo * (1 - 1e-12) && lambdas[j] <= e.window_hi * (1 + 1e-12)) idx.push_back(j);
  }
  if (idx.empty()) throw WindowError("no grid point inside the plateau window");
  e.points = idx.size();

  auto plateau = [&](const std::vector<std::size_t>& which, double* spread) {
    std::vector<double> r;
    for (std::size_t j : idx) {
      double s = 0.0;
      for (std::size_t c : which) s += static_cast<double>(curves[c][j]);
      r.push_back(s / static_cast<double>(which.size()) / std::pow(lambdas[j], params.gamma));
    }
    const double m = stats::mean(r);
    if (spread) {
      const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
      *spread = m > 0.0 ? (*hi - *lo) / m : 0.0;
    }
    return m;
  };

  std::vector<std::size_t> all(curves.size());
  for (std::size_t c = 0; c < all.size(); ++c) all[c] = c;
  e.value = plateau(all, &e.spread);
  e.ci_low = e.ci_high = e.value;
  if (curves.size() > 1 && bootstrap > 0) {
    Rng rng = make_rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, curves.size() - 1);
    std::vector<double> reps;
    std::vector<std::size_t> which(curves.size());
    for (std::size_t b = 0; b < bootstrap; ++b) {
      for (auto& w : which) w = pick(rng);
      reps.push_back(plateau(which, nullptr));
    }
    e.ci_low = stats::quantile(reps, 0.025);
    e.ci_high = stats::quantile(reps, 0.975);
  }
  if (e.spread > 0.25) {
    e.converged = false;
    e.warning = "plateau spread " + std::to_string(e.spread) + " exceeds 25%";
  }
  return e;
}

nlohmann::json renewal_report(const StableParams& params, const MInfinityEstimate* estimate) {
  const RenewalMeasure nu = nu_gamma(params);
  const double h = 1e-5;
  const double dpsi = (psi(params, 1.0 + h) - psi(params, 1.0 - h)) / (2.0 * h);
  nlohmann::json j;
  j["alpha"] = params.alpha;
  j["gamma"] = params.gamma;
  j["beta"] = params.beta;
  j["M_inv"] = nu.mean();
  nlohmann::json diag;
  diag["nu_gamma_validation_error"] = nu.validation_error;
  diag["mean_from_intensity"] = renewal_mean_from_intensity(params);
  diag["mean_from_density"] = renewal_mean_quadrature(params);
  diag["psi_prime_1_central_difference"] = dpsi;
  diag["minus_psi_prime_1_over_gamma"] = -dpsi / params.gamma;
  nlohmann::json kernels = nlohmann::json::array();
  for (double lambda : {0.1, 1.0, 10.0}) {
    kernels.push_back({{"lambda", lambda},
                       {"closed_form", laplace_renewal_kernel(params, lambda)},
                       {"series", laplace_renewal_kernel_series(params, lambda)}});
  }
  diag["laplace_kernel"] = kernels;
  if (estimate) {
    j["m_infinity"] = estimate->value;
    j["ci_low"] = estimate->ci_low;
    j["ci_high"] = estimate->ci_high;
    diag["plateau_spread"] = estimate->spread;
    diag["plateau_window"] = {estimate->window_lo, estimate->window_hi};
    diag["curves"] = estimate->curves;
    diag["converged"] = estimate->converged;
    if (!estimate->warning.empty()) diag["warning"] = estimate->warning;
  } else {
    j["m_infinity"] = nullptr;
    j["ci_low"] = nullptr;
    j["ci_high"] = nullptr;
  }
  j["diagnostics"] = diag;
  return j;
}

}  // namespace stabletree
