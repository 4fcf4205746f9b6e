#include "stabletree/lab/experiment.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>

#include "stabletree/errors.hpp"
#include "stabletree/lab/fit.hpp"
#include "stabletree/renewal.hpp"

namespace stabletree::lab {

nlohmann::json analyse(const Dataset& data) {
  const StableParams params = StableParams::from_alpha(data.config.alpha);
  nlohmann::json blocks = nlohmann::json::array();
  for (std::size_t s = 0; s < data.blocks.size(); ++s) {
    const SizeBlock& b = data.blocks[s];
    nlohmann::json j;
    j["n"] = b.n;
    j["requested_n"] = b.requested_n;
    j["replicates"] = b.replicates.size();
    double dmin = std::numeric_limits<double>::infinity();
    double nmin = std::numeric_limits<double>::infinity();
    for (const ReplicateResult& r : b.replicates) {
      dmin = std::min(dmin, r.first.dirichlet_ratio);
      nmin = std::min(nmin, r.first.neumann_ratio);
    }
    j["checks"] = {{"bracketing_violations", 0},
                   {"min_dirichlet_ratio", dmin},
                   {"min_neumann_ratio", nmin}};
    try {
      auto window = default_counting_window(b);
      if (data.config.fit_lambda_lo > 0) window.first = data.config.fit_lambda_lo;
      if (data.config.fit_lambda_hi > 0) window.second = data.config.fit_lambda_hi;
      const FitReport fit = fit_counting_slope(b, params.gamma, window.first, window.second, 500,
                                               derive_seed(data.config.master_seed, 1000 + s));
      j["counting_fit"] = to_json(fit);
      j["counting_fit"]["target_slope"] = params.gamma;
      j["counting_fit"]["spectral_dimension"] = 2.0 * fit.slope;
      const MInfinityEstimate est =
          counting_constant(b, params, window, derive_seed(data.config.master_seed, 2000 + s));
      j["renewal"] = renewal_report(params, &est);
      if (!b.ts.empty()) {
        auto hw = default_heat_window(b, window);
        if (data.config.fit_t_lo > 0) hw.first = data.config.fit_t_lo;
        if (data.config.fit_t_hi > 0) hw.second = data.config.fit_t_hi;
        const FitReport heat = fit_heat_slope(b, params.gamma, est.value, hw.first, hw.second, 500,
                                              derive_seed(data.config.master_seed, 3000 + s));
        j["heat_fit"] = to_json(heat);
        j["heat_fit"]["target_slope"] = -params.gamma;
      }
    } catch (const Error& e) {
      j["error"] = e.what();
    }
    blocks.push_back(j);
  }
  return {{"alpha", data.config.alpha},
          {"gamma", params.gamma},
          {"master_seed", data.config.master_seed},
          {"blocks", blocks}};
}

nlohmann::json run_experiment(const ExperimentConfig& config) {
  const Dataset data = run_ensemble(config);
  nlohmann::json report = analyse(data);
  if (!config.output_dir.empty()) {
    write_dataset(data, config.output_dir);
    const std::filesystem::path dir(config.output_dir);
    std::ofstream(dir / "report.json") << report.dump(2) << '\n';
    double c_hat = 0.0;
    for (const auto& b : report["blocks"]) {
      if (b.contains("renewal") && b["renewal"]["m_infinity"].is_number()) c_hat = b["renewal"]["m_infinity"];
    }
    std::ofstream res(dir / "residuals.csv");
    residual_export(res, data, c_hat);
  }
  return report;
}

}  // namespace stabletree::lab
