#include "stabletree/comparison.hpp"

#include <string>

#include "stabletree/decomp.hpp"
#include "stabletree/errors.hpp"
#include "stabletree/rng.hpp"
#include "stabletree/spectra.hpp"
#include "stabletree/treegen.hpp"

namespace stabletree {

std::size_t ComparisonReport::upper_tested() const {
  std::size_t k = 0;
  for (const auto& r : rows) k += r.below_threshold;
  return k;
}

std::size_t ComparisonReport::upper_failures() const {
  std::size_t k = 0;
  for (const auto& r : rows) k += r.below_threshold && !r.upper_holds;
  return k;
}

ComparisonReport comparison_check(const MetricTree& input, double alpha, std::span<const double> lambdas,
                                  std::uint64_t seed) {
  MetricTree tree = input;
  if (!tree.marked) pick_mass_vertex(tree, derive_seed(seed, 0));
  const std::vector<DecompRecord> comps =
      decompose(tree, alpha, derive_seed(seed, 1), DecomposeOptions{.rescale = false, .mark = true});
  if (comps.empty()) throw PreconditionError("tree has no vertex off the spine");

  ComparisonReport report;
  report.components = comps.size();
  const std::vector<Vertex>& path = *comps.front().spine;

  MetricTree spine_tree;
  spine_tree.root = 0;
  for (std::size_t j = 0; j < path.size(); ++j) {
    const auto v = static_cast<std::size_t>(path[j]);
    spine_tree.parent.push_back(j == 0 ? kNoVertex : static_cast<Vertex>(j - 1));
    spine_tree.edge_length.push_back(j == 0 ? 0.0 : tree.edge_length[v]);
    spine_tree.mass.push_back(tree.mass[v]);
    if (j > 0) report.spine_length += tree.edge_length[v];
    report.spine_mass += tree.mass[v];
  }
  report.threshold = 1.0 / (report.spine_length * report.spine_mass);

  const std::size_t m = lambdas.size();
  const Vertex boundary[2] = {tree.root, *tree.marked};
  const auto full_n = count_below_many(SpectralOperator::assemble(tree), lambdas);
  const auto full_d = count_below_many(SpectralOperator::assemble(tree, boundary), lambdas);
  const auto spine_n = count_below_many(SpectralOperator::assemble(spine_tree), lambdas);

  std::vector<std::int64_t> sum_d(m, 0), sum_n(m, 0);
  for (const DecompRecord& rec : comps) {
    const Vertex cb[2] = {rec.component.root, *rec.component.marked};
    const auto cn = count_below_many(SpectralOperator::assemble(rec.component), lambdas);
    const auto cd = count_below_many(SpectralOperator::assemble(rec.component, cb), lambdas);
    for (std::size_t j = 0; j < m; ++j) {
      sum_n[j] += cn[j];
      sum_d[j] += cd[j];
    }
  }

  const auto k = static_cast<std::int64_t>(comps.size());
  for (std::size_t j = 0; j < m; ++j) {
    ComparisonRow row;
    row.lambda = lambdas[j];
    row.lower = sum_d[j];
    row.dirichlet = full_d[j];
    row.neumann = full_n[j];
    row.upper = 1 + sum_n[j] - k;
    row.decoupled = spine_n[j] + sum_n[j];
    row.below_threshold = lambdas[j] < report.threshold;
    row.lower_holds = row.lower <= row.dirichlet && row.dirichlet <= row.neumann;
    row.upper_holds = row.neumann <= row.upper;
    if (!row.lower_holds) {
      throw StructuralFailure("lower comparison chain violated at lambda=" + std::to_string(row.lambda) +
                              ": sum N_i^D=" + std::to_string(row.lower) + ", N^D=" +
                              std::to_string(row.dirichlet) + ", N=" + std::to_string(row.neumann));
    }
    if (row.neumann > row.decoupled) {
      throw StructuralFailure("decoupling bound violated at lambda=" + std::to_string(row.lambda));
    }
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace stabletree
