#include "stabletree/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <numeric>
#include <ostream>

#include "stabletree/errors.hpp"
#include "stabletree/rng.hpp"
#include "stabletree/treegen.hpp"

namespace stabletree {

std::string to_string(const Address& address) {
  std::string s = "[";
  for (std::size_t i = 0; i < address.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(address[i]);
  }
  return s + "]";
}

std::vector<Vertex> spine(const MetricTree& tree) {
  if (!tree.marked) throw PreconditionError("spine needs a marked vertex");
  if (*tree.marked == tree.root) throw PreconditionError("marked vertex coincides with the root");
  return root_path(tree, *tree.marked);
}

std::vector<DecompRecord> decompose(const MetricTree& tree, double alpha, std::uint64_t seed,
                                    DecomposeOptions options) {
  if (!(alpha > 1.0 && alpha <= 2.0)) throw ParameterError("alpha must lie in (1, 2]");
  auto path = std::make_shared<const std::vector<Vertex>>(spine(tree));
  const std::size_t n = tree.size();
  std::vector<char> on_spine(n, 0);
  double spine_mass = 0.0;
  for (Vertex v : *path) {
    on_spine[static_cast<std::size_t>(v)] = 1;
    spine_mass += tree.mass[static_cast<std::size_t>(v)];
  }
  const double total = tree.total_mass();
  if (!(total > 0.0)) throw PreconditionError("cannot decompose a massless tree");

  const ChildLists children = child_lists(tree);
  struct Piece {
    Vertex attach;
    Vertex top;
    double mass;
    std::vector<Vertex> vertices;
  };
  std::vector<Piece> pieces;
  for (Vertex s : *path) {
    for (Vertex c : children.of(s)) {
      if (on_spine[static_cast<std::size_t>(c)]) continue;
      Piece piece{s, c, 0.0, {s, c}};
      for (std::size_t head = 1; head < piece.vertices.size(); ++head) {
        const Vertex v = piece.vertices[head];
        piece.mass += tree.mass[static_cast<std::size_t>(v)];
        for (Vertex ch : children.of(v)) piece.vertices.push_back(ch);
      }
      pieces.push_back(std::move(piece));
    }
  }
  std::sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) {
    if (a.mass != b.mass) return a.mass > b.mass;
    if (a.attach != b.attach) return a.attach < b.attach;
    return a.top < b.top;
  });

  std::vector<DecompRecord> out;
  out.reserve(pieces.size());
  std::vector<std::int32_t> local(n, -1);
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    Piece& piece = pieces[i];
    DecompRecord rec;
    rec.address = {static_cast<std::uint32_t>(i + 1)};
    rec.delta = piece.mass / total;
    rec.bigD = rec.delta;
    rec.attach = piece.attach;
    rec.spine = path;
    rec.spine_mass = spine_mass / total;
    rec.seed = derive_seed(seed, i + 1);

    const double length_scale =
        options.rescale && rec.delta > 0.0 ? std::pow(rec.delta, (1.0 - alpha) / alpha) : 1.0;
    const double mass_scale = options.rescale && piece.mass > 0.0 ? 1.0 / piece.mass : 1.0;
    const std::size_t m = piece.vertices.size();
    MetricTree& comp = rec.component;
    comp.parent.assign(m, kNoVertex);
    comp.edge_length.assign(m, 0.0);
    comp.mass.assign(m, 0.0);
    comp.root = 0;
    for (std::size_t j = 0; j < m; ++j) local[static_cast<std::size_t>(piece.vertices[j])] = static_cast<std::int32_t>(j);
    for (std::size_t j = 1; j < m; ++j) {
      const auto v = static_cast<std::size_t>(piece.vertices[j]);
      comp.parent[j] = local[static_cast<std::size_t>(tree.parent[v])];
      comp.edge_length[j] = tree.edge_length[v] * length_scale;
      comp.mass[j] = tree.mass[v] * mass_scale;
    }
    for (Vertex v : piece.vertices) local[static_cast<std::size_t>(v)] = -1;
    if (options.mark && piece.mass > 0.0) pick_mass_vertex(comp, derive_seed(rec.seed, 0));
    rec.vertices = std::move(piece.vertices);
    out.push_back(std::move(rec));
  }
  return out;
}

std::map<Address, DecompRecord> recurse(const MetricTree& tree, double alpha, int depth,
                                        std::uint64_t seed, std::size_t min_vertices) {
  if (depth < 1) throw ParameterError("recursion depth must be at least 1");
  if (min_vertices < 2) throw ParameterError("component size floor must be at least 2");
  std::map<Address, DecompRecord> out;
  std::vector<DecompRecord> level = decompose(tree, alpha, seed);
  for (int d = 1; d <= depth; ++d) {
    std::vector<DecompRecord> next;
    for (DecompRecord& rec : level) {
      if (d < depth && rec.component.size() >= min_vertices && rec.component.marked &&
          *rec.component.marked != rec.component.root) {
        std::vector<DecompRecord> kids = decompose(rec.component, alpha, derive_seed(rec.seed, 1));
        for (DecompRecord& kid : kids) {
          Address a = rec.address;
          a.push_back(kid.address.front());
          kid.address = std::move(a);
          kid.bigD = rec.bigD * kid.delta;
          next.push_back(std::move(kid));
        }
      }
      Address key = rec.address;
      out.emplace(std::move(key), std::move(rec));
    }
    level = std::move(next);
  }
  return out;
}

namespace {

nlohmann::json record_json(const DecompRecord& r) {
  nlohmann::json j;
  j["address"] = r.address;
  j["delta"] = r.delta;
  j["bigD"] = r.bigD;
  j["attach"] = r.attach;
  j["spine_mass"] = r.spine_mass;
  j["spine"] = r.spine ? *r.spine : std::vector<Vertex>{};
  j["vertices"] = r.vertices;
  j["component"] = {{"root", r.component.root},
                    {"marked", r.component.marked ? nlohmann::json(*r.component.marked) : nlohmann::json()},
                    {"parent", r.component.parent},
                    {"edge_length", r.component.edge_length},
                    {"mass", r.component.mass}};
  return j;
}

}  // namespace

void write_records_jsonl(std::ostream& os, const std::vector<DecompRecord>& records) {
  for (const DecompRecord& r : records) os << record_json(r).dump() << '\n';
}

void write_records_jsonl(std::ostream& os, const std::map<Address, DecompRecord>& records) {
  for (const auto& [address, r] : records) os << record_json(r).dump() << '\n';
}

}  // namespace stabletree
