#include "stabletree/pdlaw.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

#include "stabletree/errors.hpp"
#include "stabletree/quadrature.hpp"

namespace stabletree {

PDParams PDParams::stable(double alpha) {
  if (!(alpha > 1.0 && alpha <= 2.0)) throw ParameterError("alpha must lie in (1, 2]");
  return PDParams{1.0 / alpha, 1.0 - 1.0 / alpha};
}

void PDParams::validate() const {
  if (!(a > 0.0 && a < 1.0)) throw ParameterError("PD parameter a must lie in (0,1)");
  if (!(theta + a > 0.0)) throw ParameterError("PD parameter theta must exceed -a");
}

StableParams StableParams::from_alpha(double alpha) {
  if (!(alpha > 1.0 && alpha <= 2.0)) throw ParameterError("alpha must lie in (1, 2]");
  StableParams p;
  p.alpha = alpha;
  p.gamma = alpha / (2.0 * alpha - 1.0);
  p.beta = (alpha - 1.0) / (2.0 * alpha - 1.0);
  return p;
}

double PDWeights::total() const {
  return std::accumulate(weights.begin(), weights.end(), 0.0) + remainder;
}

StickBreaking break_sticks(const PDParams& params, const TruncationPolicy& policy, Rng& rng) {
  params.validate();
  if (!(policy.tolerance > 0.0 && policy.tolerance < 0.5)) {
    throw ParameterError("truncation tolerance must lie in (0, 0.5)");
  }
  StickBreaking out;
  double residual = 1.0;
  for (std::size_t i = 1; residual >= policy.tolerance; ++i) {
    if (i > policy.max_sticks) {
      if (policy.carry_on_cap) break;
      throw TruncationFailure("stick-breaking residual " + std::to_string(residual) +
                              " above tolerance after " + std::to_string(policy.max_sticks) +
                              " sticks");
    }
    const double w = sample_beta(rng, 1.0 - params.a, params.stick_beta_b(i));
    const double piece = residual * w;
    out.fractions.push_back(w);
    out.pieces.push_back(piece);
    residual -= piece;
  }
  out.remainder = residual;
  return out;
}

PDWeights sample_pd(const PDParams& params, const TruncationPolicy& policy, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  StickBreaking sticks = break_sticks(params, policy, rng);
  PDWeights out;
  out.params = params;
  out.seed = seed;
  out.remainder = sticks.remainder;
  out.tail_theta = params.theta + static_cast<double>(sticks.pieces.size()) * params.a;
  out.weights = std::move(sticks.pieces);
  std::sort(out.weights.begin(), out.weights.end(), std::greater<>());
  return out;
}

double psi(const StableParams& params, double x) {
  if (x < 0.0) throw ParameterError("psi is defined for x >= 0");
  const double alpha = params.alpha;
  if (x <= 1.0 / alpha) return std::numeric_limits<double>::infinity();
  return (alpha - 1.0) / (alpha * x - 1.0);
}

double psi_derivative(const StableParams& params, double x) {
  const double alpha = params.alpha;
  if (x <= 1.0 / alpha) return -std::numeric_limits<double>::infinity();
  const double d = alpha * x - 1.0;
  return -(alpha - 1.0) * alpha / (d * d);
}

namespace {

double log_beta_fn(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

// With v = w^p, p = 1/(1-a), the measure v^(-a) dv becomes p dw; what remains
// of an integrand f(v) v^(-1-a) is f(v)/v.
struct PowerSubstitution {
  double p;
  explicit PowerSubstitution(double a) : p(1.0 / (1.0 - a)) {}
  double v(double w) const { return std::pow(w, p); }
  double one_minus_v(double w) const { return -std::expm1(p * std::log(w)); }
};

}  // namespace

double pd_intensity(const PDParams& params, const std::function<double(double)>& f) {
  return pd_intensity(params, f, 0.0, 1.0);
}

double pd_intensity(const PDParams& params, const std::function<double(double)>& f, double lo, double hi) {
  params.validate();
  if (!(lo >= 0.0 && lo <= hi && hi <= 1.0)) throw ParameterError("intensity range must lie in [0, 1]");
  const double a = params.a;
  const double b = params.theta + a;
  const PowerSubstitution sub(a);
  const double norm = sub.p * std::exp(-log_beta_fn(1.0 - a, b));
  auto integrand = [&](double w) {
    const double v = sub.v(w);
    if (v <= std::numeric_limits<double>::min()) return 0.0;
    return f(v) / v * std::pow(sub.one_minus_v(w), b - 1.0);
  };
  if (lo == hi) return 0.0;
  const double wlo = lo == 0.0 ? 0.0 : std::pow(lo, 1.0 - a);
  const double whi = hi == 1.0 ? 1.0 : std::pow(hi, 1.0 - a);
  return norm * quad::integrate_singular(integrand, wlo, whi, 1e-13).value;
}

double two_pick_constant(const PDParams& params) {
  const double a = params.a;
  const double t = params.theta;
  const double lg = std::lgamma(t + 1.0) + std::lgamma(t + a + 1.0) - 2.0 * std::lgamma(1.0 - a) -
                    std::lgamma(t + a) - std::lgamma(t + 2.0 * a);
  return std::exp(lg);
}

double two_pick_expectation(const PDParams& params, const std::function<double(double)>& f,
                            const std::function<double(double)>& g) {
  params.validate();
  const double a = params.a;
  const double t = params.theta;
  const PowerSubstitution sub(a);
  auto inner = [&](double x) {
    auto integrand = [&](double w) {
      const double y = sub.v(w);
      if (y <= std::numeric_limits<double>::min()) return 0.0;
      return g((1.0 - x) * y) / y * std::pow(sub.one_minus_v(w), t + 2.0 * a - 1.0);
    };
    return quad::integrate_singular(integrand, 0.0, 1.0, 1e-11).value;
  };
  auto outer = [&](double s) {
    const double x = sub.v(s);
    if (x <= std::numeric_limits<double>::min()) return 0.0;
    const double fx = f(x);
    if (fx == 0.0) return 0.0;
    return fx / x * std::pow(sub.one_minus_v(s), t + a - 1.0) * inner(x);
  };
  const double value = quad::integrate_singular(outer, 0.0, 1.0, 1e-11).value;
  return two_pick_constant(params) * sub.p * sub.p * value;
}

double completed_sum(const PDWeights& w, const std::function<double(double)>& f, Rng& rng) {
  double s = 0.0;
  for (double v : w.weights) s += f(v);
  if (w.remainder > 0.0) {
    const double a = w.params.a;
    const double w1 = sample_beta(rng, 1.0 - a, w.tail_theta + a);
    s += f(w.remainder * w1) / w1;
  }
  return s;
}

double completed_pair_sum(const PDWeights& w, const std::function<double(double)>& f,
                          const std::function<double(double)>& g, Rng& rng) {
  double sf = 0.0, sg = 0.0, diag = 0.0;
  for (double v : w.weights) {
    const double fv = f(v);
    const double gv = g(v);
    sf += fv;
    sg += gv;
    diag += fv * gv;
  }
  double total = sf * sg - diag;
  if (w.remainder > 0.0) {
    const double a = w.params.a;
    const double r = w.remainder;
    const double w1 = sample_beta(rng, 1.0 - a, w.tail_theta + a);
    const double w2 = sample_beta(rng, 1.0 - a, w.tail_theta + 2.0 * a);
    const double tail_f = f(r * w1) / w1;
    const double tail_g = g(r * w1) / w1;
    const double tail_pair = tail_f * g(r * (1.0 - w1) * w2) / w2;
    total += sf * tail_g + tail_f * sg + tail_pair;
  }
  return total;
}

double size_biased_pick(const PDWeights& w, Rng& rng) {
  const double u = uniform_open(rng);
  double acc = 0.0;
  for (double v : w.weights) {
    acc += v;
    if (u < acc) return v;
  }
  if (w.remainder <= 0.0) return w.weights.empty() ? 0.0 : w.weights.back();
  const double a = w.params.a;
  return w.remainder * sample_beta(rng, 1.0 - a, w.tail_theta + a);
}

}  // namespace stabletree
