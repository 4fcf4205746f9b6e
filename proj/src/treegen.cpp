#include "stabletree/treegen.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "stabletree/errors.hpp"

namespace stabletree {

OffspringLaw::OffspringLaw(double alpha) : alpha_(alpha) {
  if (!(alpha > 1.0 && alpha <= 2.0)) throw ParameterError("offspring law needs alpha in (1, 2]");
  pmf_.assign(kTable, 0.0);
  tail_.assign(kTable + 1, 0.0);
  pmf_[0] = 1.0 / alpha;
  // c_k = (-1)^k binom(alpha, k); p_k = c_k / alpha for k >= 2.
  double c = -alpha;
  for (std::uint64_t k = 2; k < kTable; ++k) {
    c *= (static_cast<double>(k) - 1.0 - alpha) / static_cast<double>(k);
    pmf_[k] = c / alpha;
  }
  tail_[0] = 1.0;
  tail_[1] = 1.0 - 1.0 / alpha;
  for (std::uint64_t k = 2; k <= kTable; ++k) tail_[k] = tail(k);
}

double OffspringLaw::pmf(std::uint64_t k) const {
  if (k < kTable) return pmf_[k];
  return tail(k) - tail(k + 1);
}

double OffspringLaw::tail(std::uint64_t k) const {
  if (k == 0) return 1.0;
  if (k == 1) return 1.0 - 1.0 / alpha_;
  if (alpha_ == 2.0) return k == 2 ? 0.5 : 0.0;
  if (k <= kTable && !tail_.empty() && tail_[k] != 0.0) return tail_[k];
  // Gamma(k - alpha) / Gamma(k), evaluated as a ratio to keep full precision for large k.
  const double ratio = boost::math::tgamma_delta_ratio(static_cast<double>(k) - alpha_, alpha_);
  return ratio / (alpha_ * std::fabs(std::tgamma(1.0 - alpha_)));
}

std::uint64_t OffspringLaw::invert_tail(double u) const {
  // Largest k with tail(k) >= u; tail is non-increasing with tail(0) = 1.
  if (u > tail_[kTable]) {
    const auto it = std::upper_bound(tail_.begin(), tail_.end(), u,
                                     [](double value, double t) { return value > t; });
    return static_cast<std::uint64_t>(it - tail_.begin()) - 1;
  }
  std::uint64_t lo = kTable;  // tail(lo) >= u
  std::uint64_t hi = 2 * kTable;
  constexpr std::uint64_t kCap = std::uint64_t{1} << 62;
  while (hi < kCap && tail(hi) >= u) {
    lo = hi;
    hi *= 2;
  }
  if (hi >= kCap) return kCap;
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (tail(mid) >= u) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

std::uint64_t OffspringLaw::sample(Rng& rng) const { return invert_tail(uniform_open(rng)); }

std::uint64_t OffspringLaw::sample_at_least(Rng& rng, std::uint64_t k_min) const {
  const double t = tail(k_min);
  if (t <= 0.0) throw ParameterError("conditioning offspring on a null event");
  return std::max(k_min, invert_tail(uniform_open(rng) * t));
}

OffspringLaw stable_offspring_law(double alpha) { return OffspringLaw(alpha); }

std::size_t cycle_lemma_start(std::span<const std::uint64_t> offspring) {
  long long s = 0;
  long long best = std::numeric_limits<long long>::max();
  std::size_t arg = 0;
  for (std::size_t i = 0; i < offspring.size(); ++i) {
    s += static_cast<long long>(offspring[i]) - 1;
    if (s < best) {
      best = s;
      arg = i;
    }
  }
  if (s != -1) throw ParameterError("offspring counts must sum to n - 1");
  return (arg + 1) % offspring.size();
}

MetricTree tree_from_offspring(std::span<const std::uint64_t> offspring) {
  const std::size_t n = offspring.size();
  if (n == 0) throw ParameterError("empty offspring sequence");
  MetricTree tree;
  tree.parent.assign(n, kNoVertex);
  tree.edge_length.assign(n, 1.0);
  tree.edge_length[0] = 0.0;
  tree.mass.assign(n, 1.0);
  tree.root = 0;
  struct Open {
    Vertex v;
    std::uint64_t left;
  };
  std::vector<Open> stack;
  if (offspring[0] > 0) stack.push_back({0, offspring[0]});
  for (std::size_t i = 1; i < n; ++i) {
    while (!stack.empty() && stack.back().left == 0) stack.pop_back();
    if (stack.empty()) throw ParameterError("offspring sequence is not a Lukasiewicz path");
    tree.parent[i] = stack.back().v;
    --stack.back().left;
    if (offspring[i] > 0) stack.push_back({static_cast<Vertex>(i), offspring[i]});
  }
  for (const Open& o : stack) {
    if (o.left != 0) throw ParameterError("offspring sequence leaves unfilled children");
  }
  return tree;
}

MetricTree sample_conditioned_tree(const OffspringLaw& law, std::size_t n, std::uint64_t seed,
                                   ConditioningOptions options) {
  if (n == 0) throw ParameterError("tree size must be at least 1");
  if (n > static_cast<std::size_t>(std::numeric_limits<Vertex>::max())) {
    throw ParameterError("tree size exceeds vertex index range");
  }
  if (law.period() == 2 && n % 2 == 0) {
    throw SamplingFailure("binary law produces only odd sizes; n=" + std::to_string(n));
  }
  if (n == 2) throw SamplingFailure("no two-vertex tree has positive probability since p_1 = 0");
  Rng rng = make_rng(seed);
  const std::uint64_t target = n - 1;
  // Histogram cells for small k are drawn by sequential binomials; the few
  // vertices with more children are drawn one by one from the tail.
  constexpr std::uint64_t kSmall = 64;
  std::vector<std::uint64_t> counts(kSmall + 1);
  std::vector<std::uint64_t> large;
  const std::size_t max_attempts = options.max_attempts ? options.max_attempts : 200 * n + 1000;

  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    std::fill(counts.begin(), counts.end(), 0);
    large.clear();
    std::uint64_t remaining = n;
    std::uint64_t sum = 0;
    bool rejected = false;
    std::uint64_t k = 0;
    for (; k <= kSmall && remaining > 0; ++k) {
      const double t = law.tail(k);
      if (t <= 0.0) break;
      const double q = std::min(1.0, law.pmf(k) / t);
      if (q <= 0.0) continue;
      std::uint64_t c = remaining;
      if (q < 1.0) c = std::binomial_distribution<std::uint64_t>(remaining, q)(rng);
      counts[k] = c;
      sum += k * c;
      remaining -= c;
      // every remaining vertex contributes at least k + 1
      if (sum > target || (remaining > 0 && sum + remaining * (k + 1) > target)) {
        rejected = true;
        break;
      }
    }
    if (rejected) continue;
    for (; remaining > 0; --remaining) {
      const std::uint64_t x = law.sample_at_least(rng, kSmall + 1);
      if (x > target - sum) {
        rejected = true;
        break;
      }
      sum += x;
      large.push_back(x);
    }
    if (rejected || sum != target) continue;

    std::vector<std::uint64_t> seq;
    seq.reserve(n);
    for (std::uint64_t kk = 0; kk <= kSmall; ++kk) seq.insert(seq.end(), counts[kk], kk);
    seq.insert(seq.end(), large.begin(), large.end());
    std::shuffle(seq.begin(), seq.end(), rng);
    const std::size_t start = cycle_lemma_start(seq);
    std::rotate(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(start), seq.end());
    return tree_from_offspring(seq);
  }
  throw SamplingFailure("conditioning on size " + std::to_string(n) + " failed after " +
                        std::to_string(max_attempts) + " attempts");
}

MetricTree rescale_to_metric(MetricTree tree, double alpha) {
  if (!(alpha > 1.0 && alpha <= 2.0)) throw ParameterError("alpha must lie in (1, 2]");
  const double n = static_cast<double>(tree.size());
  const double length = std::pow(n, -(alpha - 1.0) / alpha);
  for (std::size_t v = 0; v < tree.size(); ++v) {
    tree.edge_length[v] = static_cast<Vertex>(v) == tree.root ? 0.0 : length;
    tree.mass[v] = 1.0 / n;
  }
  return tree;
}

Vertex pick_mass_vertex(MetricTree& tree, Rng& rng) {
  const double total = tree.total_mass();
  if (!(total > 0.0)) throw PreconditionError("cannot pick a vertex from a massless tree");
  const double u = uniform_open(rng) * total;
  double acc = 0.0;
  Vertex last_massive = kNoVertex;
  for (std::size_t v = 0; v < tree.size(); ++v) {
    if (tree.mass[v] <= 0.0) continue;
    last_massive = static_cast<Vertex>(v);
    acc += tree.mass[v];
    if (u < acc) {
      tree.marked = last_massive;
      return last_massive;
    }
  }
  tree.marked = last_massive;
  return last_massive;
}

Vertex pick_mass_vertex(MetricTree& tree, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return pick_mass_vertex(tree, rng);
}

}  // namespace stabletree
