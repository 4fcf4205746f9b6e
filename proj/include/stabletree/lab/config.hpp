#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace stabletree::lab {

/// Log-spaced grid. lo <= 0 or decades <= 0 means "choose from a pilot tree".
struct LogGrid {
  double lo = 0.0;
  double decades = 0.0;
  int points_per_decade = 16;

  bool automatic() const { return !(lo > 0.0 && decades > 0.0); }
  std::vector<double> points() const;
};

struct ExperimentConfig {
  double alpha = 1.5;
  std::vector<std::size_t> tree_sizes{1000};
  std::size_t ensemble_size = 10;
  LogGrid lambda_grid{0.0, 0.0, 16};
  LogGrid t_grid{0.0, 0.0, 8};
  /// Neumann eigenvalues extracted per tree for heat traces; 0 disables them.
  std::size_t eigen_count = 0;
  std::uint64_t master_seed = 1;
  std::size_t workers = 1;
  std::string output_dir;

  // Optional fit windows; 0 selects the default window.
  double fit_lambda_lo = 0.0;
  double fit_lambda_hi = 0.0;
  double fit_t_lo = 0.0;
  double fit_t_hi = 0.0;

  /// Throws ParameterError on an invalid combination.
  void validate() const;
};

/// Flat "key = value" text, '#' starts a comment. Keys are the field names;
/// grids use lambda_min, lambda_decades, points_per_decade, t_min,
/// t_decades, t_points_per_decade. tree_sizes is a comma separated list.
/// output_dir defaults to $STABLETREE_OUTPUT_DIR when not given.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

void write_config(std::ostream& out, const ExperimentConfig& config);

}  // namespace stabletree::lab
