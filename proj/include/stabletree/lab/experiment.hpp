#pragma once

#include <json.hpp>

#include "stabletree/lab/config.hpp"
#include "stabletree/lab/ensemble.hpp"

namespace stabletree::lab {

/// Fits and summary checks of a finished dataset, one entry per tree size:
/// counting slope, m(inf) plateau, heat slope and constant ratio (when heat
/// traces exist) and the smallest first-eigenvalue ratios. Window problems
/// are reported as "error" entries rather than thrown.
nlohmann::json analyse(const Dataset& data);

/// run_ensemble, then write the dataset, report.json and residuals.csv to
/// config.output_dir (when set). Returns the report.
nlohmann::json run_experiment(const ExperimentConfig& config);

}  // namespace stabletree::lab
