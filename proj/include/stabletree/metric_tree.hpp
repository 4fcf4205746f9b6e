#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace stabletree {

using Vertex = std::int32_t;
inline constexpr Vertex kNoVertex = -1;

/// Rooted tree with a resistance on every edge and a mass on every vertex.
/// Edge `v` joins v to parent[v]; edge_length[root] is unused (0).
struct MetricTree {
  std::vector<Vertex> parent;
  std::vector<double> edge_length;
  std::vector<double> mass;
  Vertex root = 0;
  std::optional<Vertex> marked;

  std::size_t size() const { return parent.size(); }
  double total_mass() const;

  /// Throws ParameterError unless the arrays describe a single tree with
  /// positive edge lengths and non-negative masses.
  void validate() const;
};

/// Children in compressed form: children of v are
/// targets[offsets[v] .. offsets[v+1]), in increasing vertex order.
struct ChildLists {
  std::vector<std::int32_t> offsets;
  std::vector<Vertex> targets;

  std::span<const Vertex> of(Vertex v) const {
    return {targets.data() + offsets[v], targets.data() + offsets[v + 1]};
  }
};

ChildLists child_lists(const MetricTree& tree);

/// Vertices ordered so that every parent precedes its children (root first).
std::vector<Vertex> top_down_order(const MetricTree& tree);

/// Resistance distance from `source` to every vertex.
std::vector<double> distances_from(const MetricTree& tree, Vertex source);

/// Exact diameter in the resistance metric (two farthest-point sweeps).
double diameter(const MetricTree& tree);

/// Path from the root to `target`, root first.
std::vector<Vertex> root_path(const MetricTree& tree, Vertex target);

/// Serialization: header "n root [marked]", then one line
/// "index parent edge_length mass" per vertex (root parent is -1).
/// Reals are printed in shortest round-trip form, so write/read is bit-exact.
void write_tree(std::ostream& os, const MetricTree& tree);
MetricTree read_tree(std::istream& is);

}  // namespace stabletree
