#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "stabletree/lab/config.hpp"
#include "stabletree/spectra.hpp"

namespace stabletree::lab {

struct ReplicateResult {
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
  CountingCurve curve;
  /// Heat trace and its truncation bound at every t of the block grid.
  std::vector<double> heat;
  std::vector<double> heat_bound;
  FirstEigenReport first;
  double diameter = 0.0;
  double height = 0.0;
};

struct SizeBlock {
  std::size_t requested_n = 0;
  /// Tree size actually used (the binary law only produces odd sizes, so an
  /// even request is raised by one at alpha = 2).
  std::size_t n = 0;
  std::vector<double> lambdas;
  std::vector<double> ts;
  std::vector<ReplicateResult> replicates;
};

struct Dataset {
  ExperimentConfig config;
  std::vector<SizeBlock> blocks;
};

/// Size the conditioned sampler can produce for a requested n.
std::size_t feasible_size(double alpha, std::size_t n);

/// Seed of replicate r of size index s.
std::uint64_t replicate_seed(std::uint64_t master, std::size_t size_index, std::size_t replicate);

/// Samples every (size, replicate), evaluates N, N^D and N-1 on the lambda
/// grid, runs the bracketing and first-eigenvalue checks and, when
/// eigen_count > 0, the Neumann heat trace on the t grid. Results do not
/// depend on the number of workers. The first StructuralFailure (in task
/// order) aborts the run, with the offending alpha, n and seed in the message.
Dataset run_ensemble(const ExperimentConfig& config);

/// Writes curves.csv, heat.csv and checks.csv into config.output_dir.
void write_dataset(const Dataset& data, const std::string& dir);

void write_curves_csv(std::ostream& os, const Dataset& data);
void write_heat_csv(std::ostream& os, const Dataset& data);
void write_checks_csv(std::ostream& os, const Dataset& data);

/// Mean over replicates of N^D (or the heat trace) at every grid point.
std::vector<double> mean_dirichlet(const SizeBlock& block);
std::vector<double> mean_heat(const SizeBlock& block);

}  // namespace stabletree::lab
