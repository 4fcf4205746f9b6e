#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "stabletree/metric_tree.hpp"

namespace stabletree {

struct ComparisonRow {
  double lambda = 0.0;
  /// Sum over components of their Dirichlet counts.
  std::int64_t lower = 0;
  std::int64_t dirichlet = 0;
  std::int64_t neumann = 0;
  /// 1 + sum over components of (Neumann count - 1).
  std::int64_t upper = 0;
  /// Neumann count of the spine plus the sum of component Neumann counts.
  std::int64_t decoupled = 0;
  bool below_threshold = false;
  bool lower_holds = false;
  bool upper_holds = false;
};

struct ComparisonReport {
  std::size_t components = 0;
  double spine_length = 0.0;
  double spine_mass = 0.0;
  /// 1 / (spine_length * spine_mass).
  double threshold = 0.0;
  std::vector<ComparisonRow> rows;

  std::size_t upper_tested() const;
  std::size_t upper_failures() const;
};

/// Compares the counting functions of a tree with those of the components of
/// its spinal decomposition. Component counts at lambda * Delta_i^(1/gamma) for
/// the rescaled components are evaluated as counts of the unrescaled
/// components at lambda, which is the same integer.
///
/// The lower chain sum N_i^D <= N^D <= N and the decoupling bound
/// N <= N_spine + sum N_i are theorems on every tree; a violation throws
/// StructuralFailure. The bound N <= 1 + sum (N_i - 1) is only recorded, per
/// shift, for shifts below the spine threshold.
///
/// The mark is used when present, otherwise drawn from `seed`.
ComparisonReport comparison_check(const MetricTree& tree, double alpha,
                                  std::span<const double> lambdas, std::uint64_t seed);

}  // namespace stabletree
