#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "stabletree/metric_tree.hpp"
#include "stabletree/simd/inertia.hpp"

namespace stabletree {

/// Relative pivot magnitude below which a shift counts as a grid collision.
inline constexpr double kPivotTol = 1e-13;
/// Eigenvalue extraction only rejects exactly vanishing pivots.
inline constexpr double kExtractPivotTol = 0.0;

/// Stiffness/mass pencil (L, M) of the resistance form of a tree, with the
/// boundary vertices clamped (rows and columns removed). Stored in leaf-first
/// elimination order, which makes LDL^T factorization fill-free.
class SpectralOperator {
 public:
  SpectralOperator() = default;

  /// Conductance 1/edge_length on every edge. An empty boundary gives the
  /// Neumann operator, {root, marked} the Dirichlet one.
  static SpectralOperator assemble(const MetricTree& tree, std::span<const Vertex> boundary = {});

  /// Number of retained (unclamped) vertices.
  std::size_t dimension() const { return order_.size(); }
  /// Number of finite generalized eigenvalues (retained vertices with mass > 0).
  std::size_t finite_dimension() const { return finite_dimension_; }
  /// Multiplicity of the eigenvalue 0: 1 for a Neumann operator, else 0.
  std::size_t kernel_dimension() const { return kernel_dimension_; }

  /// order()[i] is the tree vertex eliminated at step i.
  const std::vector<Vertex>& order() const { return order_; }
  /// Elimination position of a tree vertex, -1 when clamped.
  std::int32_t position(Vertex v) const { return position_[static_cast<std::size_t>(v)]; }
  const std::vector<Vertex>& boundary() const { return boundary_; }

  const std::vector<double>& diagonal() const { return diag_; }
  const std::vector<double>& mass() const { return mass_; }
  const std::vector<double>& offdiag_squared() const { return w2_; }
  const std::vector<std::int32_t>& parent_position() const { return parent_; }

  simd::InertiaView view() const;

  /// f^T L f for f indexed by tree vertex (clamped entries treated as 0).
  double quadratic_form(std::span<const double> f) const;

  struct Entry {
    std::int32_t row;
    std::int32_t col;
    double value;
  };
  /// Stiffness entries in elimination positions (both triangles).
  std::vector<Entry> stiffness_entries() const;

  /// Off-diagonal fill created by symbolic elimination in the stored order.
  /// Always 0 for a tree.
  std::size_t symbolic_fill() const;

 private:
  std::vector<Vertex> order_;
  std::vector<std::int32_t> position_;
  std::vector<Vertex> boundary_;
  std::vector<double> diag_;
  std::vector<double> mass_;
  std::vector<double> w2_;
  std::vector<std::int32_t> parent_;
  std::vector<double> cond_;
  std::size_t finite_dimension_ = 0;
  std::size_t kernel_dimension_ = 0;
};

/// Number of generalized eigenvalues <= lambda. A vanishing pivot is resolved
/// by factorizing at lambda -/+ 1e-12*(1+|lambda|); GridCollision is thrown
/// when those counts differ, i.e. lambda is numerically an eigenvalue.
std::int64_t count_below(const SpectralOperator& op, double lambda, double pivot_tol = kPivotTol);

/// Counts for many shifts, batched through the active SIMD kernel. Shifts
/// that collide are retried at lambda + 1e-12*(1+|lambda|) (repeatedly,
/// doubling the step).
std::vector<std::int64_t> count_below_many(const SpectralOperator& op,
                                           std::span<const double> lambdas,
                                           double pivot_tol = kPivotTol);

struct CountingCurve {
  std::vector<double> lambdas;
  std::vector<std::int64_t> neumann;
  std::vector<std::int64_t> dirichlet;
  std::vector<std::int64_t> shifted;  // neumann - 1
};

/// Evaluates N, N^D and N-1 on an increasing grid and checks that all counts
/// are non-decreasing, N^D <= N <= N^D + 2, N(0) = 1 and N^D(0) = 0. Any
/// violation throws StructuralFailure.
CountingCurve counting_curve(const SpectralOperator& neumann, const SpectralOperator& dirichlet,
                             std::span<const double> lambdas);

/// The k smallest finite eigenvalues (with multiplicity), each located by
/// multisection on the counting function to relative width rel_tol.
std::vector<double> eigen_extract(const SpectralOperator& op, std::size_t k,
                                  double rel_tol = 1e-10);

struct HeatTrace {
  double value = 0.0;
  double truncation_bound = 0.0;
};

/// sum_i exp(-lambda_i t) over the supplied eigenvalues, with the bound
/// exp(-lambda_k t) * (dimension - k) on the missing terms. Throws
/// InsufficientSpectrum when the bound exceeds max_fraction of the value.
HeatTrace heat_trace(std::span<const double> eigs, double t, std::size_t dimension,
                     double max_fraction = 0.01);

struct FirstEigenReport {
  double diameter = 0.0;
  double total_mass = 0.0;
  double threshold = 0.0;  // 1 / (diameter * total_mass)
  double dirichlet_first = 0.0;
  double neumann_first_nonzero = 0.0;
  double dirichlet_ratio = 0.0;
  double neumann_ratio = 0.0;
};

/// lambda_1 * diameter * mass >= 1 for the Dirichlet operator and for the
/// first nonzero Neumann eigenvalue. Throws StructuralFailure when a ratio is
/// below 1 - 1e-9. Either operator may have no finite eigenvalue, in which
/// case its ratio is reported as +inf.
FirstEigenReport first_eig_bound_check(const SpectralOperator& neumann,
                                       const SpectralOperator& dirichlet, const MetricTree& tree);

}  // namespace stabletree
