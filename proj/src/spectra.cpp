#include "stabletree/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "stabletree/errors.hpp"

namespace stabletree {

SpectralOperator SpectralOperator::assemble(const MetricTree& tree, std::span<const Vertex> boundary) {
  tree.validate();
  const std::size_t n = tree.size();
  std::vector<char> clamped(n, 0);
  for (Vertex b : boundary) {
    if (b < 0 || static_cast<std::size_t>(b) >= n) throw ParameterError("boundary vertex out of range");
    clamped[static_cast<std::size_t>(b)] = 1;
  }

  SpectralOperator op;
  for (std::size_t v = 0; v < n; ++v) {
    if (clamped[v]) op.boundary_.push_back(static_cast<Vertex>(v));
  }

  std::vector<Vertex> top = top_down_order(tree);
  op.position_.assign(n, -1);
  for (auto it = top.rbegin(); it != top.rend(); ++it) {
    if (clamped[static_cast<std::size_t>(*it)]) continue;
    op.position_[static_cast<std::size_t>(*it)] = static_cast<std::int32_t>(op.order_.size());
    op.order_.push_back(*it);
  }

  const std::size_t m = op.order_.size();
  op.diag_.assign(m, 0.0);
  op.mass_.assign(m, 0.0);
  op.w2_.assign(m, 0.0);
  op.parent_.assign(m, -1);
  op.cond_.assign(m, 0.0);

  for (std::size_t v = 0; v < n; ++v) {
    const Vertex p = tree.parent[v];
    if (p == kNoVertex) continue;
    const double c = 1.0 / tree.edge_length[v];
    const std::int32_t iv = op.position_[v];
    const std::int32_t ip = op.position_[static_cast<std::size_t>(p)];
    if (iv >= 0) op.diag_[static_cast<std::size_t>(iv)] += c;
    if (ip >= 0) op.diag_[static_cast<std::size_t>(ip)] += c;
    if (iv >= 0 && ip >= 0) {
      op.parent_[static_cast<std::size_t>(iv)] = ip;
      op.cond_[static_cast<std::size_t>(iv)] = c;
      op.w2_[static_cast<std::size_t>(iv)] = c * c;
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    op.mass_[i] = tree.mass[static_cast<std::size_t>(op.order_[i])];
    if (op.mass_[i] > 0.0) ++op.finite_dimension_;
  }
  op.kernel_dimension_ = (op.boundary_.empty() && op.finite_dimension_ > 0) ? 1 : 0;
  return op;
}

simd::InertiaView SpectralOperator::view() const {
  return {order_.size(), diag_.data(), mass_.data(), w2_.data(), parent_.data()};
}

double SpectralOperator::quadratic_form(std::span<const double> f) const {
  if (f.size() != position_.size()) throw ParameterError("vector size does not match the tree");
  double q = 0.0;
  for (std::size_t i = 0; i < order_.size(); ++i) {
    const double fi = f[static_cast<std::size_t>(order_[i])];
    q += diag_[i] * fi * fi;
    if (parent_[i] >= 0) {
      const double fp = f[static_cast<std::size_t>(order_[static_cast<std::size_t>(parent_[i])])];
      q -= 2.0 * cond_[i] * fi * fp;
    }
  }
  return q;
}

std::vector<SpectralOperator::Entry> SpectralOperator::stiffness_entries() const {
  std::vector<Entry> out;
  for (std::size_t i = 0; i < order_.size(); ++i) {
    const auto ii = static_cast<std::int32_t>(i);
    out.push_back({ii, ii, diag_[i]});
    if (parent_[i] >= 0) {
      out.push_back({ii, parent_[i], -cond_[i]});
      out.push_back({parent_[i], ii, -cond_[i]});
    }
  }
  return out;
}

std::size_t SpectralOperator::symbolic_fill() const {
  const std::size_t m = order_.size();
  std::vector<std::set<std::int32_t>> adj(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (parent_[i] >= 0) {
      adj[i].insert(parent_[i]);
      adj[static_cast<std::size_t>(parent_[i])].insert(static_cast<std::int32_t>(i));
    }
  }
  std::size_t fill = 0;
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<std::int32_t> later;
    for (std::int32_t j : adj[i]) {
      if (j > static_cast<std::int32_t>(i)) later.push_back(j);
    }
    for (std::size_t a = 0; a < later.size(); ++a) {
      for (std::size_t b = a + 1; b < later.size(); ++b) {
        auto& row = adj[static_cast<std::size_t>(later[a])];
        if (row.insert(later[b]).second) {
          adj[static_cast<std::size_t>(later[b])].insert(later[a]);
          ++fill;
        }
      }
    }
  }
  return fill;
}

std::int64_t count_below(const SpectralOperator& op, double lambda, double pivot_tol) {
  if (op.dimension() == 0 || lambda < 0.0) return 0;
  if (lambda == 0.0) return static_cast<std::int64_t>(op.kernel_dimension());
  auto sweep = [&](double x) {
    std::int64_t c = 0;
    simd::inertia_scalar(op.view(), std::span<const double>(&x, 1), std::span<std::int64_t>(&c, 1), pivot_tol);
    return c;
  };
  const std::int64_t c = sweep(lambda);
  if (c != simd::kCollision) return c;
  // A small pivot need not mean an eigenvalue: if clean factorizations on both
  // sides agree, none lies within the perturbation.
  const double step = 1e-12 * (1.0 + std::fabs(lambda));
  const std::int64_t below = sweep(lambda - step);
  const std::int64_t above = sweep(lambda + step);
  if (below != simd::kCollision && below == above) return above;
  throw GridCollision(lambda);
}

namespace {

// Counts at the given shifts; collided shifts are moved upward in place
// until the factorization is clean.
std::vector<std::int64_t> count_and_adjust(const SpectralOperator& op, std::vector<double>& lambdas,
                                           double pivot_tol) {
  std::vector<std::int64_t> counts(lambdas.size(), 0);
  if (op.dimension() == 0) return counts;
  std::vector<double> positive;
  std::vector<std::size_t> where;
  for (std::size_t j = 0; j < lambdas.size(); ++j) {
    if (lambdas[j] < 0.0) {
      counts[j] = 0;
    } else if (lambdas[j] == 0.0) {
      counts[j] = static_cast<std::int64_t>(op.kernel_dimension());
    } else {
      positive.push_back(lambdas[j]);
      where.push_back(j);
    }
  }
  std::vector<std::int64_t> pc(positive.size());
  simd::inertia(op.view(), positive, pc, pivot_tol);
  for (std::size_t q = 0; q < positive.size(); ++q) {
    double lambda = positive[q];
    std::int64_t c = pc[q];
    double step = 1e-12 * (1.0 + std::fabs(lambda));
    for (int attempt = 0; c == simd::kCollision && attempt < 60; ++attempt) {
      lambda += step;
      step *= 2.0;
      simd::inertia_scalar(op.view(), std::span<const double>(&lambda, 1),
                           std::span<std::int64_t>(&c, 1), pivot_tol);
    }
    if (c == simd::kCollision) throw GridCollision(positive[q]);
    counts[where[q]] = c;
    lambdas[where[q]] = lambda;
  }
  return counts;
}

}  // namespace

std::vector<std::int64_t> count_below_many(const SpectralOperator& op, std::span<const double> lambdas,
                                           double pivot_tol) {
  std::vector<double> shifts(lambdas.begin(), lambdas.end());
  return count_and_adjust(op, shifts, pivot_tol);
}

CountingCurve counting_curve(const SpectralOperator& neumann, const SpectralOperator& dirichlet,
                             std::span<const double> lambdas) {
  for (std::size_t j = 1; j < lambdas.size(); ++j) {
    if (!(lambdas[j] > lambdas[j - 1])) throw ParameterError("lambda grid must be increasing");
  }
  if (!dirichlet.boundary().empty() && neumann.dimension() != dirichlet.dimension() + dirichlet.boundary().size()) {
    throw ParameterError("operators do not come from the same tree");
  }
  CountingCurve curve;
  curve.lambdas.assign(lambdas.begin(), lambdas.end());
  curve.neumann = count_below_many(neumann, lambdas);
  curve.dirichlet = count_below_many(dirichlet, lambdas);
  curve.shifted.resize(lambdas.size());
  for (std::size_t j = 0; j < lambdas.size(); ++j) {
    const std::int64_t n = curve.neumann[j];
    const std::int64_t d = curve.dirichlet[j];
    curve.shifted[j] = n - 1;
    if (j > 0 && (n < curve.neumann[j - 1] || d < curve.dirichlet[j - 1])) {
      throw StructuralFailure("counting function decreased at lambda=" + std::to_string(lambdas[j]));
    }
    if (!(d <= n && n <= d + 2)) {
      throw StructuralFailure("bracketing N^D <= N <= N^D + 2 violated at lambda=" +
                              std::to_string(lambdas[j]) + " (N=" + std::to_string(n) +
                              ", N^D=" + std::to_string(d) + ")");
    }
  }
  if (neumann.dimension() > 0 && count_below(neumann, 0.0) != 1) {
    throw StructuralFailure("Neumann count at 0 differs from 1");
  }
  if (count_below(dirichlet, 0.0) != 0) throw StructuralFailure("Dirichlet count at 0 differs from 0");
  return curve;
}

std::vector<double> eigen_extract(const SpectralOperator& op, std::size_t k, double rel_tol) {
  if (k > op.finite_dimension()) {
    throw ParameterError("requested " + std::to_string(k) + " eigenvalues of an operator with " +
                         std::to_string(op.finite_dimension()) + " finite ones");
  }
  std::vector<double> eigs(k, 0.0);
  const auto target = static_cast<std::int64_t>(k);
  const auto kernel = static_cast<std::int64_t>(op.kernel_dimension());
  if (target <= kernel) return eigs;

  double hi = 1.0;
  std::int64_t chi = count_below_many(op, std::span<const double>(&hi, 1))[0];
  while (chi < target) {
    hi *= 2.0;
    if (!std::isfinite(hi)) throw DivergenceError("no upper bound found for the spectrum");
    std::vector<double> one{hi};
    chi = count_and_adjust(op, one, kExtractPivotTol)[0];
    hi = one[0];
  }

  struct Interval {
    double lo, hi;
    std::int64_t clo, chi;
  };
  std::vector<Interval> active{{0.0, hi, kernel, chi}};
  const std::size_t lanes = std::max<std::size_t>(8, simd::preferred_batch());
  std::vector<double> shifts;
  std::vector<Interval> next;

  while (!active.empty()) {
    next.clear();
    std::vector<Interval> open;
    for (const Interval& iv : active) {
      if (iv.hi - iv.lo <= rel_tol * iv.hi) {
        const double mid = 0.5 * (iv.lo + iv.hi);
        for (std::int64_t j = iv.clo; j < std::min(iv.chi, target); ++j) eigs[static_cast<std::size_t>(j)] = mid;
      } else {
        open.push_back(iv);
      }
    }
    if (open.empty()) break;
    const std::size_t points =
        simd::active_isa() == simd::Isa::Scalar ? 1 : std::max<std::size_t>(1, lanes / open.size());
    shifts.clear();
    for (const Interval& iv : open) {
      for (std::size_t p = 1; p <= points; ++p) {
        shifts.push_back(iv.lo + (iv.hi - iv.lo) * static_cast<double>(p) / static_cast<double>(points + 1));
      }
    }
    const std::vector<std::int64_t> counts = count_and_adjust(op, shifts, kExtractPivotTol);
    for (std::size_t q = 0; q < open.size(); ++q) {
      double lo = open[q].lo;
      std::int64_t clo = open[q].clo;
      std::vector<Interval> pieces;
      bool split = false;
      for (std::size_t p = 0; p <= points; ++p) {
        double x = open[q].hi;
        std::int64_t cx = open[q].chi;
        if (p < points) {
          x = shifts[q * points + p];
          cx = counts[q * points + p];
          if (!(x > lo && x < open[q].hi)) continue;
          split = true;
        }
        if (cx > clo && clo < target) pieces.push_back({lo, x, clo, cx});
        lo = x;
        clo = std::max(clo, cx);
      }
      if (!split) {
        // every shift was pushed out of the interval: it cannot shrink further
        const double mid = 0.5 * (open[q].lo + open[q].hi);
        for (std::int64_t j = open[q].clo; j < std::min(open[q].chi, target); ++j) {
          eigs[static_cast<std::size_t>(j)] = mid;
        }
      } else {
        next.insert(next.end(), pieces.begin(), pieces.end());
      }
    }
    active.swap(next);
  }
  return eigs;
}

HeatTrace heat_trace(std::span<const double> eigs, double t, std::size_t dimension, double max_fraction) {
  if (!(t > 0.0)) throw ParameterError("heat trace needs t > 0");
  if (eigs.size() > dimension) throw ParameterError("more eigenvalues than the dimension");
  HeatTrace h;
  for (double lambda : eigs) h.value += std::exp(-lambda * t);
  if (eigs.size() < dimension) {
    const double last = eigs.empty() ? 0.0 : eigs.back();
    h.truncation_bound = std::exp(-last * t) * static_cast<double>(dimension - eigs.size());
  }
  if (h.truncation_bound > max_fraction * h.value) {
    throw InsufficientSpectrum("heat trace truncation bound " + std::to_string(h.truncation_bound) +
                               " exceeds " + std::to_string(max_fraction) + " of the value " +
                               std::to_string(h.value) + " at t=" + std::to_string(t));
  }
  return h;
}

FirstEigenReport first_eig_bound_check(const SpectralOperator& neumann, const SpectralOperator& dirichlet,
                                       const MetricTree& tree) {
  FirstEigenReport r;
  r.diameter = diameter(tree);
  r.total_mass = tree.total_mass();
  const double scale = r.diameter * r.total_mass;
  constexpr double inf = std::numeric_limits<double>::infinity();
  r.threshold = scale > 0.0 ? 1.0 / scale : inf;

  r.dirichlet_first = inf;
  if (dirichlet.finite_dimension() >= 1) r.dirichlet_first = eigen_extract(dirichlet, 1).back();
  r.neumann_first_nonzero = inf;
  const std::size_t kn = neumann.kernel_dimension() + 1;
  if (neumann.finite_dimension() >= kn) r.neumann_first_nonzero = eigen_extract(neumann, kn).back();

  r.dirichlet_ratio = std::isfinite(r.dirichlet_first) ? r.dirichlet_first * scale : inf;
  r.neumann_ratio = std::isfinite(r.neumann_first_nonzero) ? r.neumann_first_nonzero * scale : inf;
  if (r.dirichlet_ratio < 1.0 - 1e-9 || r.neumann_ratio < 1.0 - 1e-9) {
    throw StructuralFailure("first eigenvalue below 1/(diameter*mass): Dirichlet ratio " +
                            std::to_string(r.dirichlet_ratio) + ", Neumann ratio " +
                            std::to_string(r.neumann_ratio));
  }
  return r;
}

}  // namespace stabletree
