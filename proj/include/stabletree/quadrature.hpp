#pragma once

#include <functional>

namespace stabletree::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
};

/// Integral over (a, b) of a function that may carry integrable endpoint
/// singularities (double-exponential rule). Throws DivergenceError when the
/// rule cannot reach `tol` relative to the L1 norm of the integrand.
Result integrate_singular(const std::function<double(double)>& f, double a, double b,
                          double tol = 1e-12);

/// Adaptive Gauss-Kronrod (61 point) on a finite interval, absolute tolerance.
Result integrate_smooth(const std::function<double(double)>& f, double a, double b,
                        double abs_tol = 1e-12);

/// Integral over [a, inf) for integrands decaying at infinity.
Result integrate_half_line(const std::function<double(double)>& f, double a = 0.0,
                           double tol = 1e-12);

}  // namespace stabletree::quad
