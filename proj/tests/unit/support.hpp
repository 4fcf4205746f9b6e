#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "stabletree/metric_tree.hpp"
#include "stabletree/rng.hpp"

namespace testing {

using stabletree::MetricTree;
using stabletree::Vertex;

/// Random recursive tree: vertex v attaches to a uniform earlier vertex.
inline MetricTree random_tree(std::size_t n, stabletree::Rng& rng, bool unit = false) {
  MetricTree t;
  t.parent.assign(n, -1);
  t.edge_length.assign(n, 0.0);
  t.mass.assign(n, 1.0);
  std::uniform_real_distribution<double> len(0.5, 2.0), mass(0.1, 1.0);
  for (std::size_t v = 0; v < n; ++v) {
    if (v > 0) {
      t.parent[v] = static_cast<Vertex>(std::uniform_int_distribution<std::size_t>(0, v - 1)(rng));
      t.edge_length[v] = unit ? 1.0 : len(rng);
    }
    if (!unit) t.mass[v] = mass(rng);
  }
  t.root = 0;
  return t;
}

inline MetricTree path_tree(std::size_t n, double length = 1.0, double mass = 1.0) {
  MetricTree t;
  for (std::size_t v = 0; v < n; ++v) {
    t.parent.push_back(v == 0 ? -1 : static_cast<Vertex>(v - 1));
    t.edge_length.push_back(v == 0 ? 0.0 : length);
    t.mass.push_back(mass);
  }
  return t;
}

inline MetricTree star_tree(std::size_t leaves, double length = 1.0, double mass = 1.0) {
  MetricTree t;
  t.parent.push_back(-1);
  t.edge_length.push_back(0.0);
  t.mass.push_back(mass);
  for (std::size_t i = 0; i < leaves; ++i) {
    t.parent.push_back(0);
    t.edge_length.push_back(length);
    t.mass.push_back(mass);
  }
  return t;
}

/// Finite generalized eigenvalues of (L, M) with the boundary vertices removed,
/// built directly from the tree. Zero-mass vertices are condensed out.
inline std::vector<double> dense_spectrum(const MetricTree& t, std::span<const Vertex> boundary = {}) {
  const std::size_t n = t.size();
  std::vector<int> index(n, -1);
  std::vector<std::size_t> keep_pos, keep_zero;
  std::vector<Vertex> kept;
  for (std::size_t v = 0; v < n; ++v) {
    if (std::find(boundary.begin(), boundary.end(), static_cast<Vertex>(v)) != boundary.end()) continue;
    index[v] = static_cast<int>(kept.size());
    kept.push_back(static_cast<Vertex>(v));
  }
  const auto m = static_cast<Eigen::Index>(kept.size());
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t v = 0; v < n; ++v) {
    if (t.parent[v] < 0) continue;
    const double c = 1.0 / t.edge_length[v];
    const int a = index[v];
    const int b = index[static_cast<std::size_t>(t.parent[v])];
    if (a >= 0) L(a, a) += c;
    if (b >= 0) L(b, b) += c;
    if (a >= 0 && b >= 0) {
      L(a, b) -= c;
      L(b, a) -= c;
    }
  }
  for (std::size_t i = 0; i < kept.size(); ++i) {
    (t.mass[static_cast<std::size_t>(kept[i])] > 0.0 ? keep_pos : keep_zero).push_back(i);
  }
  const auto p = static_cast<Eigen::Index>(keep_pos.size());
  const auto z = static_cast<Eigen::Index>(keep_zero.size());
  if (p == 0) return {};
  Eigen::MatrixXd Lpp(p, p), Lpz(p, z), Lzz(z, z);
  Eigen::VectorXd M(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    M(i) = t.mass[static_cast<std::size_t>(kept[keep_pos[static_cast<std::size_t>(i)]])];
    for (Eigen::Index j = 0; j < p; ++j) Lpp(i, j) = L(keep_pos[i], keep_pos[j]);
    for (Eigen::Index j = 0; j < z; ++j) Lpz(i, j) = L(keep_pos[i], keep_zero[j]);
  }
  for (Eigen::Index i = 0; i < z; ++i) {
    for (Eigen::Index j = 0; j < z; ++j) Lzz(i, j) = L(keep_zero[i], keep_zero[j]);
  }
  Eigen::MatrixXd S = Lpp;
  if (z > 0) S -= Lpz * Lzz.ldlt().solve(Lpz.transpose());
  Eigen::VectorXd d = M.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd A = d.asDiagonal() * S * d.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (A + A.transpose()), Eigen::EigenvaluesOnly);
  std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + p);
  for (double& x : out) x = std::max(x, 0.0);
  std::sort(out.begin(), out.end());
  return out;
}

/// Number of oracle eigenvalues <= lambda.
inline std::int64_t oracle_count(const std::vector<double>& eigs, double lambda) {
  return std::upper_bound(eigs.begin(), eigs.end(), lambda) - eigs.begin();
}

/// True when lambda is relatively closer than `gap` to an oracle eigenvalue.
inline bool near_eigenvalue(const std::vector<double>& eigs, double lambda, double gap = 1e-7) {
  for (double e : eigs) {
    if (std::abs(e - lambda) <= gap * std::max(1.0, std::abs(lambda))) return true;
  }
  return false;
}

}  // namespace testing
