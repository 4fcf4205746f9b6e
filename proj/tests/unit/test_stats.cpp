#include <doctest.h>

#include <cmath>
#include <vector>

#include "stabletree/errors.hpp"
#include "stabletree/rng.hpp"
#include "stabletree/stats.hpp"

using namespace stabletree;

TEST_CASE("moments and quantiles") {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  CHECK(stats::mean(x) == 2.5);
  CHECK(stats::stddev(x) == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(stats::standard_error(x) == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
  CHECK(stats::quantile(x, 0.0) == 1.0);
  CHECK(stats::quantile(x, 1.0) == 4.0);
  CHECK(stats::quantile(x, 0.5) == 2.5);
  CHECK(stats::quantile({4.0, 1.0, 3.0, 2.0}, 1.0 / 3.0) == doctest::Approx(2.0));
}

TEST_CASE("linear fit recovers exact lines") {
  std::vector<double> x, y;
  for (int i = 0; i < 20; ++i) {
    x.push_back(std::log(1.0 + i));
    y.push_back(0.75 * x.back() - 2.0);
  }
  const stats::LinearFit f = stats::linear_fit(x, y);
  CHECK(f.slope == doctest::Approx(0.75).epsilon(1e-13));
  CHECK(f.intercept == doctest::Approx(-2.0).epsilon(1e-13));
  CHECK(f.r_squared == doctest::Approx(1.0));
  CHECK(f.slope_stderr < 1e-10);
  const std::vector<double> same{1.0, 1.0};
  CHECK_THROWS_AS(stats::linear_fit(same, same), ParameterError);
}

TEST_CASE("linear fit standard error matches the textbook formula") {
  const std::vector<double> x{0, 1, 2, 3, 4};
  const std::vector<double> y{0.1, 0.9, 2.2, 2.8, 4.1};
  const stats::LinearFit f = stats::linear_fit(x, y);
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sse += std::pow(y[i] - f.intercept - f.slope * x[i], 2);
  CHECK(f.slope == doctest::Approx(0.99));
  CHECK(f.slope_stderr == doctest::Approx(std::sqrt(sse / 3.0 / 10.0)));
}

TEST_CASE("Kolmogorov statistic and p-value") {
  // a single observation at 0.5 is at distance 0.5 from the uniform CDF
  const auto uniform = [](double v) { return std::min(1.0, std::max(0.0, v)); };
  CHECK(stats::ks_statistic({0.5}, uniform) == doctest::Approx(0.5));
  CHECK(stats::ks_statistic({0.1, 0.2, 0.9}, uniform) == doctest::Approx(2.0 / 3.0 - 0.2).epsilon(1e-12));
  CHECK(stats::ks_pvalue(0.0, 100) == doctest::Approx(1.0));
  CHECK(stats::ks_pvalue(1.0, 100) < 1e-12);
  for (std::size_t n : {50, 1000, 10000}) {
    const double c = stats::ks_critical(n, 0.01);
    CHECK(stats::ks_pvalue(c, n) == doctest::Approx(0.01).epsilon(1e-6));
  }
  // large-n critical value 1.628 / sqrt(n)
  CHECK(stats::ks_critical(1000000, 0.01) * 1000.0 == doctest::Approx(1.6276).epsilon(1e-3));
}

TEST_CASE("KS test has the nominal size on uniform samples") {
  const auto uniform = [](double v) { return std::min(1.0, std::max(0.0, v)); };
  std::size_t rejections = 0;
  const std::size_t trials = 2000;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng = make_rng(derive_seed(5, t));
    std::vector<double> x(200);
    for (double& v : x) v = uniform_open(rng);
    rejections += stats::ks_pvalue(stats::ks_statistic(x, uniform), x.size()) < 0.05;
  }
  const double rate = static_cast<double>(rejections) / trials;
  CHECK(rate == doctest::Approx(0.05).epsilon(0.3));
}
