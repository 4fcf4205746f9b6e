#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "stabletree/errors.hpp"
#include "stabletree/spectra.hpp"
#include "stabletree/treegen.hpp"
#include "support.hpp"

using namespace stabletree;

namespace {

MetricTree two_vertex(double length = 1.0) {
  MetricTree t = testing::path_tree(2, length, 0.5);
  return t;
}

// Trees used against the dense oracle: random recursive trees, conditioned
// trees and trees with some massless vertices.
MetricTree oracle_tree(std::size_t i, Rng& rng) {
  const std::size_t n = 2 + std::uniform_int_distribution<std::size_t>(0, 198)(rng);
  MetricTree t;
  switch (i % 3) {
    case 0:
      t = testing::random_tree(n, rng);
      break;
    case 1: {
      const double alpha = i % 2 ? 1.5 : 2.0;
      const std::size_t m = alpha == 2.0 ? (n | 1) : std::max<std::size_t>(n, 3);
      t = rescale_to_metric(sample_conditioned_tree(OffspringLaw(alpha), m, derive_seed(9, i)), alpha);
      break;
    }
    default:
      t = testing::random_tree(n, rng);
      for (std::size_t v = 1; v < t.size(); v += 3) t.mass[v] = 0.0;
      break;
  }
  pick_mass_vertex(t, derive_seed(19, i));
  return t;
}

}  // namespace

TEST_CASE("two-vertex stiffness matrix") {
  const double l = 0.7;
  const SpectralOperator op = SpectralOperator::assemble(two_vertex(l));
  CHECK(op.dimension() == 2);
  double m[2][2] = {{0, 0}, {0, 0}};
  for (const auto& e : op.stiffness_entries()) m[e.row][e.col] += e.value;
  CHECK(m[0][0] == doctest::Approx(1 / l));
  CHECK(m[1][1] == doctest::Approx(1 / l));
  CHECK(m[0][1] == doctest::Approx(-1 / l));
  CHECK(m[1][0] == doctest::Approx(-1 / l));
}

TEST_CASE("clamping every vertex leaves an empty operator") {
  const MetricTree t = testing::path_tree(4);
  const std::vector<Vertex> all{0, 1, 2, 3};
  const SpectralOperator op = SpectralOperator::assemble(t, all);
  CHECK(op.dimension() == 0);
  for (double lambda : {-1.0, 0.0, 0.5, 100.0}) CHECK(count_below(op, lambda) == 0);
}

TEST_CASE("quadratic form equals the edge energy") {
  Rng rng = make_rng(2);
  for (int rep = 0; rep < 20; ++rep) {
    const MetricTree t = testing::random_tree(50 + rep, rng);
    const SpectralOperator op = SpectralOperator::assemble(t);
    std::vector<double> f(t.size());
    std::normal_distribution<double> g;
    for (double& x : f) x = g(rng);
    double energy = 0.0;
    for (std::size_t v = 1; v < t.size(); ++v) {
      const double d = f[v] - f[static_cast<std::size_t>(t.parent[v])];
      energy += d * d / t.edge_length[v];
    }
    CHECK(op.quadratic_form(f) == doctest::Approx(energy).epsilon(1e-12));
  }
}

TEST_CASE("elimination order is leaf-first and fill-free") {
  Rng rng = make_rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    const MetricTree t = testing::random_tree(300, rng);
    const Vertex b[2] = {0, 150};
    for (const SpectralOperator& op : {SpectralOperator::assemble(t), SpectralOperator::assemble(t, b)}) {
      CHECK(op.symbolic_fill() == 0);
      for (std::size_t i = 0; i < op.dimension(); ++i) {
        const std::int32_t p = op.parent_position()[i];
        if (p >= 0) CHECK(static_cast<std::size_t>(p) > i);
      }
    }
  }
}

TEST_CASE("counts on the two-vertex example") {
  const SpectralOperator op = SpectralOperator::assemble(two_vertex());
  CHECK(count_below(op, -1.0) == 0);
  CHECK(count_below(op, 0.0) == 1);
  CHECK(count_below(op, 2.0) == 1);
  CHECK(count_below(op, 5.0) == 2);
  CHECK_THROWS_AS(count_below(op, 4.0), GridCollision);
  const std::vector<double> at{4.0};
  CHECK(count_below_many(op, at)[0] == 2);
}

TEST_CASE("single edge clamped at both ends") {
  const MetricTree t = two_vertex();
  const Vertex b[2] = {0, 1};
  const SpectralOperator n = SpectralOperator::assemble(t);
  const SpectralOperator d = SpectralOperator::assemble(t, b);
  const std::vector<double> grid{0.0, 1.0, 3.9, 4.1, 10.0};
  const CountingCurve c = counting_curve(n, d, grid);
  CHECK(c.dirichlet == std::vector<std::int64_t>{0, 0, 0, 0, 0});
  CHECK(c.neumann == std::vector<std::int64_t>{1, 1, 1, 2, 2});
  CHECK(c.shifted == std::vector<std::int64_t>{0, 0, 0, 1, 1});
}

TEST_CASE("inertia counts equal the dense oracle") {
  Rng rng = make_rng(4);
  std::size_t mismatches = 0, compared = 0;
  for (std::size_t i = 0; i < 50; ++i) {
    const MetricTree t = oracle_tree(i, rng);
    const Vertex b[2] = {t.root, *t.marked};
    const std::span<const Vertex> boundary = *t.marked == t.root ? std::span<const Vertex>(b, 1) : b;
    for (const auto& [op, eigs] :
         {std::pair{SpectralOperator::assemble(t), testing::dense_spectrum(t)},
          std::pair{SpectralOperator::assemble(t, boundary), testing::dense_spectrum(t, boundary)}}) {
      REQUIRE(op.finite_dimension() == eigs.size());
      const double top = eigs.empty() ? 1.0 : eigs.back() * 1.2;
      for (int j = 0; j < 25; ++j) {
        double lambda = top * std::pow(10.0, -4.0 * j / 24.0);
        while (testing::near_eigenvalue(eigs, lambda)) lambda *= 1.0 + 1e-5;
        ++compared;
        if (count_below(op, lambda) != testing::oracle_count(eigs, lambda)) ++mismatches;
      }
    }
  }
  CHECK(compared == 50 * 2 * 25);
  CHECK(mismatches == 0);
}

TEST_CASE("counting curves satisfy bracketing and the zero anchors") {
  Rng rng = make_rng(5);
  for (std::size_t i = 0; i < 30; ++i) {
    MetricTree t = oracle_tree(i, rng);
    if (*t.marked == t.root) continue;
    const Vertex b[2] = {t.root, *t.marked};
    const SpectralOperator n = SpectralOperator::assemble(t);
    const SpectralOperator d = SpectralOperator::assemble(t, b);
    std::vector<double> grid{0.0};
    for (int j = 0; j < 60; ++j) grid.push_back(1e-3 * std::pow(10.0, j / 10.0));
    const CountingCurve c = counting_curve(n, d, grid);
    CHECK(c.neumann[0] == 1);
    CHECK(c.dirichlet[0] == 0);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      CHECK(c.dirichlet[j] <= c.neumann[j]);
      CHECK(c.neumann[j] <= c.dirichlet[j] + 2);
      if (j > 0) CHECK(c.neumann[j] >= c.neumann[j - 1]);
    }
  }
}

TEST_CASE("counting curve rejects bad input") {
  const MetricTree t = testing::path_tree(5);
  const SpectralOperator n = SpectralOperator::assemble(t);
  const Vertex b[2] = {0, 4};
  const SpectralOperator d = SpectralOperator::assemble(t, b);
  const std::vector<double> decreasing{2.0, 1.0};
  CHECK_THROWS_AS(counting_curve(n, d, decreasing), ParameterError);
  const SpectralOperator other = SpectralOperator::assemble(testing::path_tree(9), b);
  const std::vector<double> grid{1.0};
  CHECK_THROWS_AS(counting_curve(n, other, grid), ParameterError);
}

TEST_CASE("eigenvalue extraction on small examples") {
  const double l = 0.5;
  const auto e = eigen_extract(SpectralOperator::assemble(two_vertex(l)), 2);
  CHECK(e[0] == 0.0);
  CHECK(e[1] == doctest::Approx(4.0 / l).epsilon(1e-10));

  const MetricTree p = testing::path_tree(3);
  const auto got = eigen_extract(SpectralOperator::assemble(p), 3);
  const auto want = testing::dense_spectrum(p);
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(got[i] - want[i]) <= 1e-9 * std::max(1.0, want[i]));
  CHECK_THROWS_AS(eigen_extract(SpectralOperator::assemble(p), 4), ParameterError);
}

TEST_CASE("full spectrum matches the dense oracle and the trace identity") {
  Rng rng = make_rng(6);
  for (std::size_t i = 0; i < 12; ++i) {
    const MetricTree t = oracle_tree(i, rng);
    const SpectralOperator op = SpectralOperator::assemble(t);
    const auto got = eigen_extract(op, op.finite_dimension());
    const auto want = testing::dense_spectrum(t);
    REQUIRE(got.size() == want.size());
    for (std::size_t k = 0; k < got.size(); ++k) {
      CHECK(std::abs(got[k] - want[k]) <= 1e-8 * std::max(1.0, want.back()));
    }
    if (i % 3 != 2) {
      double trace = 0.0;
      for (std::size_t k = 0; k < op.dimension(); ++k) trace += op.diagonal()[k] / op.mass()[k];
      const double sum = std::accumulate(got.begin(), got.end(), 0.0);
      CHECK(std::abs(sum - trace) <= 1e-8 * trace);
    }
  }
}

TEST_CASE("extraction handles repeated eigenvalues") {
  const MetricTree star = testing::star_tree(30, 1.0, 1.0);
  const SpectralOperator op = SpectralOperator::assemble(star);
  const auto got = eigen_extract(op, op.finite_dimension());
  const auto want = testing::dense_spectrum(star);
  for (std::size_t k = 0; k < got.size(); ++k) CHECK(got[k] == doctest::Approx(want[k]).epsilon(1e-9));
}

TEST_CASE("eigenvalues scale with edge lengths and masses") {
  Rng rng = make_rng(7);
  for (int rep = 0; rep < 10; ++rep) {
    const MetricTree t = testing::random_tree(120, rng);
    MetricTree s = t;
    const double c = 0.37, m = 5.5;
    for (double& x : s.edge_length) x *= c;
    for (double& x : s.mass) x *= m;
    const auto a = eigen_extract(SpectralOperator::assemble(t), 40);
    const auto b = eigen_extract(SpectralOperator::assemble(s), 40);
    for (std::size_t k = 1; k < a.size(); ++k) CHECK(b[k] == doctest::Approx(a[k] / (c * m)).epsilon(1e-9));
  }
}

TEST_CASE("heat trace of small spectra") {
  const std::vector<double> zero{0.0};
  CHECK(heat_trace(zero, 3.0, 1).value == 1.0);
  const std::vector<double> two{0.0, 4.0};
  CHECK(heat_trace(two, 1.0, 2).value == doctest::Approx(1.0 + std::exp(-4.0)).epsilon(1e-15));
  const double late = heat_trace(two, 10.0, 2).value;
  CHECK(late >= 1.0);
  CHECK(late <= 1.0 + 1e-3);
  CHECK(heat_trace(two, 1e3, 2).value == doctest::Approx(1.0));
  CHECK_THROWS_AS(heat_trace(two, 0.01, 100), InsufficientSpectrum);
  CHECK_THROWS_AS(heat_trace(two, 0.0, 2), ParameterError);
  const HeatTrace h = heat_trace(two, 1.0, 3, 1.0);
  CHECK(h.truncation_bound == doctest::Approx(std::exp(-4.0)));
}

TEST_CASE("heat trace equals the trace of the dense semigroup") {
  Rng rng = make_rng(8);
  for (int rep = 0; rep < 8; ++rep) {
    const MetricTree t = testing::random_tree(20 + 10 * rep, rng);
    const SpectralOperator op = SpectralOperator::assemble(t);
    const auto eigs = eigen_extract(op, op.finite_dimension());
    const auto n = static_cast<Eigen::Index>(t.size());
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t v = 1; v < t.size(); ++v) {
      const auto p = static_cast<Eigen::Index>(t.parent[v]);
      const auto q = static_cast<Eigen::Index>(v);
      const double c = 1.0 / t.edge_length[v];
      L(q, q) += c;
      L(p, p) += c;
      L(p, q) -= c;
      L(q, p) -= c;
    }
    Eigen::VectorXd s(n);
    for (Eigen::Index i = 0; i < n; ++i) s(i) = 1.0 / std::sqrt(t.mass[static_cast<std::size_t>(i)]);
    const Eigen::MatrixXd A = s.asDiagonal() * L * s.asDiagonal();
    for (double time : {0.01, 0.1, 1.0}) {
      const double dense = Eigen::MatrixXd((-time * A).exp()).trace();
      CHECK(heat_trace(eigs, time, op.finite_dimension()).value == doctest::Approx(dense).epsilon(1e-6));
    }
  }
}

TEST_CASE("first eigenvalue bound") {
  const MetricTree e = two_vertex();
  const Vertex b[2] = {0, 1};
  FirstEigenReport r =
      first_eig_bound_check(SpectralOperator::assemble(e), SpectralOperator::assemble(e, b), e);
  CHECK(r.neumann_first_nonzero == doctest::Approx(4.0).epsilon(1e-10));
  CHECK(r.neumann_ratio == doctest::Approx(4.0).epsilon(1e-10));
  CHECK(r.dirichlet_ratio == std::numeric_limits<double>::infinity());

  for (std::size_t k = 1; k <= 100; ++k) {
    const MetricTree s = testing::star_tree(k);
    const Vertex sb[2] = {0, 1};
    const auto want = testing::dense_spectrum(s);
    r = first_eig_bound_check(SpectralOperator::assemble(s), SpectralOperator::assemble(s, sb), s);
    CHECK(r.neumann_first_nonzero == doctest::Approx(want[1]).epsilon(1e-9));
    CHECK(r.neumann_ratio >= 1.0);
    CHECK(r.dirichlet_ratio >= 1.0);
  }

  Rng rng = make_rng(9);
  for (std::size_t i = 0; i < 40; ++i) {
    const MetricTree t = oracle_tree(i, rng);
    if (*t.marked == t.root) continue;
    const Vertex tb[2] = {t.root, *t.marked};
    r = first_eig_bound_check(SpectralOperator::assemble(t), SpectralOperator::assemble(t, tb), t);
    CHECK(r.neumann_ratio >= 1.0);
    CHECK(r.dirichlet_ratio >= 1.0);
  }
}
