#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <vector>

#include "stabletree/comparison.hpp"
#include "stabletree/decomp.hpp"
#include "stabletree/errors.hpp"
#include "stabletree/pdlaw.hpp"
#include "stabletree/spectra.hpp"
#include "stabletree/stats.hpp"
#include "stabletree/treegen.hpp"
#include "support.hpp"

using namespace stabletree;

namespace {

MetricTree marked_sample(double alpha, std::size_t n, std::uint64_t seed) {
  MetricTree t = rescale_to_metric(sample_conditioned_tree(OffspringLaw(alpha), n, derive_seed(seed, 0)), alpha);
  Rng rng = make_rng(derive_seed(seed, 1));
  do {
    pick_mass_vertex(t, rng);
  } while (*t.marked == t.root);
  return t;
}

// Ancestors of the mark by walking parent pointers, root first.
std::vector<Vertex> ancestor_walk(const MetricTree& t) {
  std::vector<Vertex> path;
  for (Vertex v = *t.marked; v != kNoVertex; v = t.parent[static_cast<std::size_t>(v)]) path.push_back(v);
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

TEST_CASE("spine of small trees") {
  MetricTree t = testing::path_tree(6);
  t.marked = 1;
  CHECK(spine(t) == std::vector<Vertex>{0, 1});
  t.marked = 5;
  CHECK(spine(t).size() == 6);
  t.marked = 0;
  CHECK_THROWS_AS(spine(t), PreconditionError);
  t.marked.reset();
  CHECK_THROWS_AS(spine(t), PreconditionError);
}

TEST_CASE("spine equals the ancestor walk") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const MetricTree t = marked_sample(1.5, 1000, seed);
    CHECK(spine(t) == ancestor_walk(t));
  }
}

TEST_CASE("star decomposes into equal singletons") {
  const std::size_t k = 9;
  MetricTree star = testing::star_tree(k);
  star.marked = 1;
  const auto comps = decompose(star, 1.5, 1);
  REQUIRE(comps.size() == k - 1);
  for (const auto& c : comps) {
    CHECK(c.delta == doctest::Approx(1.0 / static_cast<double>(k + 1)).epsilon(1e-15));
    CHECK(c.vertices.size() == 2);
    CHECK(c.attach == 0);
  }
}

TEST_CASE("decomposition partitions the off-spine mass") {
  for (double alpha : {1.5, 2.0}) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const MetricTree t = marked_sample(alpha, 2001, seed);
      const auto comps = decompose(t, alpha, seed);
      const std::vector<Vertex> sp = spine(t);
      const std::set<Vertex> on_spine(sp.begin(), sp.end());
      double sum = comps.front().spine_mass;
      std::vector<int> seen(t.size(), 0);
      for (const auto& c : comps) {
        sum += c.delta;
        CHECK(on_spine.count(c.attach) == 1);
        CHECK(c.vertices.front() == c.attach);
        CHECK(c.component.mass[0] == 0.0);
        for (std::size_t j = 1; j < c.vertices.size(); ++j) ++seen[static_cast<std::size_t>(c.vertices[j])];
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
      for (std::size_t v = 0; v < t.size(); ++v) CHECK(seen[v] == (on_spine.count(static_cast<Vertex>(v)) ? 0 : 1));
      for (std::size_t i = 1; i < comps.size(); ++i) CHECK(comps[i].delta <= comps[i - 1].delta);
    }
  }
}

TEST_CASE("component metric rescaling") {
  const double alpha = 1.5;
  const MetricTree t = marked_sample(alpha, 3001, 3);
  const auto scaled = decompose(t, alpha, 3);
  const auto raw = decompose(t, alpha, 3, DecomposeOptions{.rescale = false, .mark = false});
  REQUIRE(scaled.size() == raw.size());
  for (std::size_t i = 0; i < scaled.size(); ++i) {
    const double d = raw[i].delta;
    CHECK(diameter(scaled[i].component) ==
          doctest::Approx(std::pow(d, (1.0 - alpha) / alpha) * diameter(raw[i].component)).epsilon(1e-12));
    CHECK(scaled[i].component.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("rescaled component eigenvalues carry the factor Delta^(1/gamma)") {
  const double alpha = 1.5;
  const double gamma = StableParams::from_alpha(alpha).gamma;
  const MetricTree t = marked_sample(alpha, 2001, 4);
  const auto scaled = decompose(t, alpha, 4);
  const auto raw = decompose(t, alpha, 4, DecomposeOptions{.rescale = false, .mark = false});
  std::size_t checked = 0;
  for (std::size_t i = 0; i < scaled.size() && checked < 5; ++i) {
    if (scaled[i].component.size() < 20) continue;
    const SpectralOperator a = SpectralOperator::assemble(raw[i].component);
    const SpectralOperator b = SpectralOperator::assemble(scaled[i].component);
    const auto ea = eigen_extract(a, 10);
    const auto eb = eigen_extract(b, 10);
    const double factor = std::pow(raw[i].delta, 1.0 / gamma);
    for (std::size_t k = 1; k < 10; ++k) CHECK(eb[k] == doctest::Approx(ea[k] * factor).epsilon(1e-9));
    // the rescaled count at lambda * Delta^(1/gamma) equals the raw count at lambda
    for (double lambda : {3.0, 30.0, 300.0}) {
      CHECK(count_below_many(b, std::vector<double>{lambda * factor})[0] ==
            count_below_many(a, std::vector<double>{lambda})[0]);
    }
    ++checked;
  }
  CHECK(checked > 0);
}

TEST_CASE("recursion of depth one equals a single decomposition") {
  const MetricTree t = marked_sample(1.5, 1001, 5);
  const auto flat = decompose(t, 1.5, 5);
  const auto tree = recurse(t, 1.5, 1, 5);
  REQUIRE(tree.size() == flat.size());
  for (const auto& c : flat) {
    const auto& r = tree.at(c.address);
    CHECK(r.delta == c.delta);
    CHECK(r.vertices == c.vertices);
    CHECK(r.component.edge_length == c.component.edge_length);
  }
  CHECK_THROWS_AS(recurse(t, 1.5, 0, 5), ParameterError);
}

TEST_CASE("nested masses multiply along addresses") {
  const MetricTree t = marked_sample(1.5, 5001, 6);
  const auto rec = recurse(t, 1.5, 3, 6);
  std::size_t deep = 0;
  for (const auto& [address, r] : rec) {
    if (address.size() == 1) {
      CHECK(r.bigD == r.delta);
      continue;
    }
    Address parent(address.begin(), address.end() - 1);
    CHECK(r.bigD == rec.at(parent).bigD * r.delta);
    deep += address.size() == 3;
  }
  CHECK(deep > 0);
  std::ostringstream os;
  write_records_jsonl(os, rec);
  const std::string text = os.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(rec.size()));
}

TEST_CASE("size-biased pick of the binary tree masses follows Beta(1/2, 1)") {
  const std::size_t trees = 1500;
  std::size_t below = 0;
  std::vector<double> largest, pd_largest;
  for (std::size_t i = 0; i < trees; ++i) {
    const MetricTree t = marked_sample(2.0, 20001, derive_seed(61, i));
    const auto comps = decompose(t, 2.0, i, DecomposeOptions{.rescale = false, .mark = false});
    const double off = 1.0 - comps.front().spine_mass;
    Rng rng = make_rng(derive_seed(62, i));
    double u = uniform_open(rng) * off;
    double pick = comps.back().delta / off;
    for (const auto& c : comps) {
      u -= c.delta;
      if (u < 0.0) {
        pick = c.delta / off;
        break;
      }
    }
    below += pick <= 0.25;
    largest.push_back(comps.front().delta / off);
    TruncationPolicy policy;
    policy.max_sticks = 4096;
    policy.carry_on_cap = true;
    pd_largest.push_back(sample_pd(PDParams::stable(2.0), policy, derive_seed(63, i)).weights.front());
  }
  CHECK(std::abs(static_cast<double>(below) / trees - 0.5) <= 0.02 + 3 * std::sqrt(0.25 / trees));
  // two-sample KS distance between largest parts and PD largest parts
  std::sort(pd_largest.begin(), pd_largest.end());
  const double d = stats::ks_statistic(largest, [&](double x) {
    return static_cast<double>(std::upper_bound(pd_largest.begin(), pd_largest.end(), x) - pd_largest.begin()) /
           static_cast<double>(pd_largest.size());
  });
  CHECK(stats::ks_pvalue(d, trees / 2) > 0.01);
}

TEST_CASE("second-level squared masses average to psi(2)^2") {
  const double alpha = 1.5;
  const std::size_t trees = 2000;
  std::vector<double> sums;
  for (std::size_t i = 0; i < trees; ++i) {
    const MetricTree t = marked_sample(alpha, 20000, derive_seed(71, i));
    const auto rec = recurse(t, alpha, 2, derive_seed(72, i), 200);
    double s = 0.0;
    for (const auto& [address, r] : rec) {
      if (address.size() != 2) continue;
      // masses normalized by the off-spine mass at each level, which removes
      // the discrete spine's vanishing share
      const DecompRecord& up = rec.at(Address{address[0]});
      const double d1 = up.delta / (1.0 - up.spine_mass);
      const double d2 = r.delta / (1.0 - r.spine_mass);
      s += std::pow(d1 * d2, 2.0);
    }
    sums.push_back(s);
  }
  const double want = std::pow(psi(StableParams::from_alpha(alpha), 2.0), 2.0);
  CHECK(stats::mean(sums) == doctest::Approx(want).epsilon(0.05));
}

TEST_CASE("comparison chain on small trees against dense spectra") {
  Rng rng = make_rng(81);
  for (std::size_t i = 0; i < 20; ++i) {
    MetricTree t = testing::random_tree(30 + 8 * i, rng);
    pick_mass_vertex(t, derive_seed(82, i));
    if (*t.marked == t.root) continue;
    std::vector<double> grid;
    for (int j = 0; j < 30; ++j) grid.push_back(1e-2 * std::pow(10.0, j / 6.0));
    const ComparisonReport rep = comparison_check(t, 1.5, grid, i);
    const auto comps = decompose(t, 1.5, derive_seed(i, 1), DecomposeOptions{.rescale = false, .mark = true});
    std::vector<std::vector<double>> spectra;
    for (const auto& c : comps) {
      const Vertex b[2] = {c.component.root, *c.component.marked};
      spectra.push_back(testing::dense_spectrum(c.component, b));
    }
    const Vertex tb[2] = {t.root, *t.marked};
    const auto full_d = testing::dense_spectrum(t, tb);
    const auto full_n = testing::dense_spectrum(t);
    for (const ComparisonRow& row : rep.rows) {
      std::int64_t lower = 0;
      for (const auto& s : spectra) lower += testing::oracle_count(s, row.lambda);
      CHECK(row.lower == lower);
      CHECK(row.dirichlet == testing::oracle_count(full_d, row.lambda));
      CHECK(row.neumann == testing::oracle_count(full_n, row.lambda));
      CHECK(row.lower <= row.dirichlet);
      CHECK(row.dirichlet <= row.neumann);
      CHECK(row.neumann <= row.decoupled);
    }
  }
}

TEST_CASE("comparison report on conditioned trees") {
  std::size_t tested = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const MetricTree t = marked_sample(1.5, 10000, seed);
    std::vector<double> grid;
    for (int j = 0; j < 40; ++j) grid.push_back(0.1 * std::pow(10.0, j / 8.0));
    const ComparisonReport rep = comparison_check(t, 1.5, grid, seed);
    CHECK(rep.threshold == doctest::Approx(1.0 / (rep.spine_length * rep.spine_mass)));
    CHECK(rep.components > 0);
    CHECK(rep.upper_failures() <= rep.upper_tested());
    tested += rep.upper_tested();
    for (const auto& row : rep.rows) {
      CHECK(row.lower_holds);
      CHECK(row.below_threshold == (row.lambda < rep.threshold));
    }
  }
  CHECK(tested > 0);
}
