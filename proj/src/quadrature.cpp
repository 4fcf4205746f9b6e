#include "stabletree/quadrature.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "stabletree/errors.hpp"

namespace stabletree::quad {
namespace {

void check(const Result& r, double l1, double tol, const char* what) {
  if (!std::isfinite(r.value) || !std::isfinite(l1)) {
    throw DivergenceError(std::string(what) + ": non-finite integral");
  }
  // Double-exponential rules report errors relative to the L1 norm; a
  // divergent integrand shows up as an error that never shrinks.
  if (r.error > std::max(1e3 * tol, 1e-6) * std::max(1.0, l1)) {
    throw DivergenceError(std::string(what) + ": quadrature did not converge (error " +
                          std::to_string(r.error) + ")");
  }
}

}  // namespace

Result integrate_singular(const std::function<double(double)>& f, double a, double b,
                          double tol) {
  thread_local boost::math::quadrature::tanh_sinh<double> rule(15);
  auto guarded = [&](double x) {
    const double y = f(x);
    return std::isfinite(y) ? y : 0.0;
  };
  Result r;
  double l1 = 0.0;
  try {
    r.value = rule.integrate(guarded, a, b, tol, &r.error, &l1);
  } catch (const std::exception& e) {
    throw DivergenceError(std::string("singular quadrature failed: ") + e.what());
  }
  check(r, l1, tol, "singular quadrature");
  return r;
}

Result integrate_smooth(const std::function<double(double)>& f, double a, double b,
                        double abs_tol) {
  Result r;
  double l1 = 0.0;
  const double scale = std::max(std::fabs(b - a), 1.0);
  r.value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, a, b, 30, abs_tol / scale, &r.error, &l1);
  if (!std::isfinite(r.value)) throw DivergenceError("Gauss-Kronrod: non-finite integral");
  if (r.error > std::max(abs_tol, 1e-9 * l1) * 1e3) {
    throw DivergenceError("Gauss-Kronrod: did not converge");
  }
  return r;
}

Result integrate_half_line(const std::function<double(double)>& f, double a, double tol) {
  thread_local boost::math::quadrature::exp_sinh<double> rule(12);
  Result r;
  double l1 = 0.0;
  auto shifted = [&](double x) {
    const double y = f(a + x);
    return std::isfinite(y) ? y : 0.0;
  };
  try {
    r.value = rule.integrate(shifted, tol, &r.error, &l1);
  } catch (const std::exception& e) {
    throw DivergenceError(std::string("half-line quadrature failed: ") + e.what());
  }
  check(r, l1, tol, "half-line quadrature");
  return r;
}

}  // namespace stabletree::quad
