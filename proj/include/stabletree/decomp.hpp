#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "stabletree/metric_tree.hpp"

namespace stabletree {

/// Word over the positive integers; the empty word addresses the whole tree.
using Address = std::vector<std::uint32_t>;

std::string to_string(const Address& address);

/// One component of the tree with the path [[root, marked]] removed, closed up
/// by its attachment point on that path.
struct DecompRecord {
  Address address;
  /// Mass of the component as a fraction of the parent tree's mass.
  double delta = 0.0;
  /// Product of delta along the address.
  double bigD = 1.0;
  /// Vertex 0 is the attachment point (mass 0, the root); the mark is a fresh
  /// mass-distributed vertex. Rescaled unless extracted with rescale = false.
  MetricTree component;
  /// Parent-tree vertex of every component vertex (vertices[0] = attach).
  std::vector<Vertex> vertices;
  Vertex attach = kNoVertex;
  /// Path from root to mark in the parent tree, shared by siblings.
  std::shared_ptr<const std::vector<Vertex>> spine;
  /// Mass fraction carried by the parent's spine.
  double spine_mass = 0.0;
  /// Seed stream owned by this component.
  std::uint64_t seed = 0;
};

/// Vertex path from the root to the marked vertex. Throws PreconditionError
/// when no mark is set or the mark is the root.
std::vector<Vertex> spine(const MetricTree& tree);

struct DecomposeOptions {
  /// Scale the metric by delta^((1-alpha)/alpha) and the masses by 1/delta.
  bool rescale = true;
  /// Draw a fresh mark in every component.
  bool mark = true;
};

/// Components ordered by non-increasing mass (ties: smaller attachment
/// vertex, then smaller top vertex). Digit i of the address is the 1-based
/// rank. A tree whose vertices all lie on the spine yields an empty list.
std::vector<DecompRecord> decompose(const MetricTree& tree, double alpha, std::uint64_t seed,
                                    DecomposeOptions options = {});

/// Applies decompose to every component down to `depth` levels. Components
/// with fewer than `min_vertices` vertices are not split further.
std::map<Address, DecompRecord> recurse(const MetricTree& tree, double alpha, int depth,
                                        std::uint64_t seed, std::size_t min_vertices = 2);

/// One JSON object per line.
void write_records_jsonl(std::ostream& os, const std::vector<DecompRecord>& records);
void write_records_jsonl(std::ostream& os, const std::map<Address, DecompRecord>& records);

}  // namespace stabletree
