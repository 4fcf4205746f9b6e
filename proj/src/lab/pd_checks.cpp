#include "stabletree/lab/pd_checks.hpp"

#include <cmath>

#include "stabletree/errors.hpp"
#include "stabletree/lab/parallel.hpp"
#include "stabletree/pdlaw.hpp"
#include "stabletree/rng.hpp"
#include "stabletree/stats.hpp"

namespace stabletree::lab {

namespace {

TruncationPolicy policy_for(const PdCheckConfig& config) {
  TruncationPolicy p;
  p.max_sticks = config.max_sticks;
  p.carry_on_cap = true;
  return p;
}

}  // namespace

PdCheckReport pd_moment_check(const PdCheckConfig& config) {
  if (config.samples < 2) throw ParameterError("pd-check needs at least two samples");
  const StableParams sp = StableParams::from_alpha(config.alpha);
  const PDParams params = PDParams::stable(config.alpha);
  const TruncationPolicy policy = policy_for(config);
  const std::size_t nx = config.xs.size();
  std::vector<double> values(config.samples * nx);
  std::vector<double> sticks(config.samples);
  parallel_for(config.samples, config.workers, [&](std::size_t i) {
    const std::uint64_t seed = derive_seed(config.seed, i);
    const PDWeights w = sample_pd(params, policy, derive_seed(seed, 0));
    Rng rng = make_rng(derive_seed(seed, 1));
    sticks[i] = static_cast<double>(w.weights.size());
    for (std::size_t k = 0; k < nx; ++k) {
      const double x = config.xs[k];
      values[i * nx + k] = completed_sum(w, [x](double v) { return std::pow(v, x); }, rng);
    }
  });
  PdCheckReport rep;
  rep.alpha = config.alpha;
  rep.samples = config.samples;
  rep.mean_sticks = stats::mean(sticks);
  for (std::size_t k = 0; k < nx; ++k) {
    std::vector<double> col(config.samples);
    for (std::size_t i = 0; i < config.samples; ++i) col[i] = values[i * nx + k];
    PdMomentRow row;
    row.x = config.xs[k];
    row.mean = stats::mean(col);
    row.std_error = stats::standard_error(col);
    row.psi = psi(sp, row.x);
    row.rel_error = std::abs(row.mean - row.psi) / row.psi;
    rep.rows.push_back(row);
  }
  return rep;
}

TwoPickReport two_pick_check(double alpha, double epsilon, const PdCheckConfig& config) {
  if (config.samples < 2) throw ParameterError("two-pick check needs at least two samples");
  const StableParams sp = StableParams::from_alpha(alpha);
  const PDParams params = PDParams::stable(alpha);
  const double e = 1.0 / alpha + epsilon / sp.gamma;
  auto f = [e](double v) { return std::pow(v, e); };
  TwoPickReport rep;
  rep.alpha = alpha;
  rep.epsilon = epsilon;
  rep.exponent = e;
  rep.quadrature = two_pick_expectation(params, f, f);
  const TruncationPolicy policy = policy_for(config);
  std::vector<double> values(config.samples);
  parallel_for(config.samples, config.workers, [&](std::size_t i) {
    const std::uint64_t seed = derive_seed(config.seed, i);
    const PDWeights w = sample_pd(params, policy, derive_seed(seed, 0));
    Rng rng = make_rng(derive_seed(seed, 1));
    values[i] = completed_pair_sum(w, f, f, rng);
  });
  rep.mc_mean = stats::mean(values);
  rep.mc_std_error = stats::standard_error(values);
  rep.z = std::abs(rep.mc_mean - rep.quadrature) / rep.mc_std_error;
  return rep;
}

nlohmann::json to_json(const PdCheckReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const PdMomentRow& row : r.rows) {
    rows.push_back({{"x", row.x},
                    {"mean", row.mean},
                    {"stderr", row.std_error},
                    {"psi", row.psi},
                    {"rel_error", row.rel_error}});
  }
  return {{"alpha", r.alpha}, {"samples", r.samples}, {"mean_sticks", r.mean_sticks}, {"moments", rows}};
}

nlohmann::json to_json(const TwoPickReport& r) {
  return {{"alpha", r.alpha},
          {"epsilon", r.epsilon},
          {"exponent", r.exponent},
          {"quadrature", r.quadrature},
          {"mc_mean", r.mc_mean},
          {"mc_stderr", r.mc_std_error},
          {"z", r.z}};
}

}  // namespace stabletree::lab
