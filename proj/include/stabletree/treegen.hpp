#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "stabletree/metric_tree.hpp"
#include "stabletree/rng.hpp"

namespace stabletree {

/// Critical offspring law with generating function f(s) = s + (1-s)^alpha / alpha.
/// p_0 = 1/alpha, p_1 = 0 and p_k = Gamma(k-alpha) / (alpha Gamma(-alpha) k!) for k >= 2,
/// so the tail P(X >= k) = Gamma(k-alpha) / (alpha |Gamma(1-alpha)| Gamma(k)) is
/// regularly varying with index -alpha. At alpha = 2 the law is binary.
class OffspringLaw {
 public:
  explicit OffspringLaw(double alpha);

  double alpha() const { return alpha_; }
  double pmf(std::uint64_t k) const;
  /// P(X >= k), exact for every k.
  double tail(std::uint64_t k) const;
  /// Offspring counts only take values in multiples of this (2 for the binary law).
  std::uint64_t period() const { return alpha_ == 2.0 ? 2 : 1; }

  std::uint64_t sample(Rng& rng) const;
  /// Sample conditioned on X >= k_min.
  std::uint64_t sample_at_least(Rng& rng, std::uint64_t k_min) const;

  /// Size of the exact pmf/tail table; larger k use the closed-form tail.
  static constexpr std::uint64_t kTable = 4096;

 private:
  std::uint64_t invert_tail(double u) const;

  double alpha_;
  std::vector<double> pmf_;   // k < kTable
  std::vector<double> tail_;  // P(X >= k), k <= kTable
};

OffspringLaw stable_offspring_law(double alpha);

/// Rotation index of the cycle lemma: for steps x_i - 1 summing to -1, the
/// sequence started at the returned index has partial sums >= 0 until the
/// final step.
std::size_t cycle_lemma_start(std::span<const std::uint64_t> offspring);

/// Plane tree (preorder labels, unit lengths and masses) from a valid
/// Lukasiewicz offspring sequence.
MetricTree tree_from_offspring(std::span<const std::uint64_t> offspring);

struct ConditioningOptions {
  /// 0 means "choose from n": 200 * n + 1000 attempts.
  std::size_t max_attempts = 0;
};

/// Galton-Watson tree conditioned to have exactly n vertices. Counts are drawn
/// as an i.i.d. multinomial histogram, rejected unless they sum to n-1, then
/// shuffled and rotated by the cycle lemma. Labels are preorder; edge lengths
/// and masses are 1.
MetricTree sample_conditioned_tree(const OffspringLaw& law, std::size_t n, std::uint64_t seed,
                                   ConditioningOptions options = {});

/// Edge lengths n^(-(alpha-1)/alpha), masses 1/n.
MetricTree rescale_to_metric(MetricTree tree, double alpha);

/// Vertex drawn with probability proportional to its mass; stored as the mark.
Vertex pick_mass_vertex(MetricTree& tree, Rng& rng);
Vertex pick_mass_vertex(MetricTree& tree, std::uint64_t seed);

}  // namespace stabletree
