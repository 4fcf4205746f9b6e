#include "stabletree/metric_tree.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "stabletree/errors.hpp"

namespace stabletree {

double MetricTree::total_mass() const { return std::accumulate(mass.begin(), mass.end(), 0.0); }

void MetricTree::validate() const {
  const std::size_t n = parent.size();
  if (n == 0) throw ParameterError("tree has no vertices");
  if (edge_length.size() != n || mass.size() != n) throw ParameterError("tree arrays differ in length");
  if (root < 0 || static_cast<std::size_t>(root) >= n) throw ParameterError("root out of range");
  if (parent[root] != kNoVertex) throw ParameterError("root must not have a parent");
  for (std::size_t v = 0; v < n; ++v) {
    if (static_cast<Vertex>(v) == root) continue;
    if (parent[v] < 0 || static_cast<std::size_t>(parent[v]) >= n) {
      throw ParameterError("vertex " + std::to_string(v) + " has no valid parent");
    }
    if (!(edge_length[v] > 0.0) || !std::isfinite(edge_length[v])) {
      throw ParameterError("edge lengths must be positive");
    }
  }
  for (double m : mass) {
    if (!(m >= 0.0) || !std::isfinite(m)) throw ParameterError("masses must be non-negative");
  }
  if (marked && (*marked < 0 || static_cast<std::size_t>(*marked) >= n)) {
    throw ParameterError("marked vertex out of range");
  }
  // Connectivity: every vertex reachable from the root exactly once.
  if (top_down_order(*this).size() != n) throw ParameterError("parent array does not encode a tree");
}

ChildLists child_lists(const MetricTree& tree) {
  const std::size_t n = tree.size();
  ChildLists c;
  c.offsets.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) {
    if (tree.parent[v] != kNoVertex) ++c.offsets[tree.parent[v] + 1];
  }
  std::partial_sum(c.offsets.begin(), c.offsets.end(), c.offsets.begin());
  c.targets.resize(c.offsets[n]);
  std::vector<std::int32_t> fill(c.offsets.begin(), c.offsets.end() - 1);
  for (std::size_t v = 0; v < n; ++v) {
    const Vertex p = tree.parent[v];
    if (p != kNoVertex) c.targets[fill[p]++] = static_cast<Vertex>(v);
  }
  return c;
}

std::vector<Vertex> top_down_order(const MetricTree& tree) {
  const ChildLists c = child_lists(tree);
  std::vector<Vertex> order;
  order.reserve(tree.size());
  order.push_back(tree.root);
  for (std::size_t head = 0; head < order.size(); ++head) {
    for (Vertex ch : c.of(order[head])) order.push_back(ch);
    if (order.size() > tree.size()) break;  // cycle guard for invalid input
  }
  return order;
}

std::vector<double> distances_from(const MetricTree& tree, Vertex source) {
  const std::size_t n = tree.size();
  const ChildLists c = child_lists(tree);
  std::vector<double> dist(n, -1.0);
  std::vector<Vertex> stack{source};
  dist[source] = 0.0;
  while (!stack.empty()) {
    const Vertex v = stack.back();
    stack.pop_back();
    const Vertex p = tree.parent[v];
    if (p != kNoVertex && dist[p] < 0.0) {
      dist[p] = dist[v] + tree.edge_length[v];
      stack.push_back(p);
    }
    for (Vertex ch : c.of(v)) {
      if (dist[ch] < 0.0) {
        dist[ch] = dist[v] + tree.edge_length[ch];
        stack.push_back(ch);
      }
    }
  }
  return dist;
}

double diameter(const MetricTree& tree) {
  if (tree.size() <= 1) return 0.0;
  const auto d0 = distances_from(tree, tree.root);
  const Vertex far = static_cast<Vertex>(std::max_element(d0.begin(), d0.end()) - d0.begin());
  const auto d1 = distances_from(tree, far);
  return *std::max_element(d1.begin(), d1.end());
}

std::vector<Vertex> root_path(const MetricTree& tree, Vertex target) {
  std::vector<Vertex> path;
  for (Vertex v = target; v != kNoVertex; v = tree.parent[v]) {
    path.push_back(v);
    if (path.size() > tree.size()) throw ParameterError("parent array contains a cycle");
  }
  std::reverse(path.begin(), path.end());
  return path;
}

namespace {

void put_double(std::string& out, double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  out.append(buf, res.ptr);
}

double parse_double(const std::string& tok) {
  double x = 0.0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), x);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
    throw ParameterError("malformed real in tree file: '" + tok + "'");
  }
  return x;
}

long long parse_int(const std::string& tok) {
  long long x = 0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), x);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
    throw ParameterError("malformed integer in tree file: '" + tok + "'");
  }
  return x;
}

}  // namespace

void write_tree(std::ostream& os, const MetricTree& tree) {
  std::string out;
  out.reserve(tree.size() * 48);
  out += std::to_string(tree.size());
  out += ' ';
  out += std::to_string(tree.root);
  if (tree.marked) {
    out += ' ';
    out += std::to_string(*tree.marked);
  }
  out += '\n';
  for (std::size_t v = 0; v < tree.size(); ++v) {
    out += std::to_string(v);
    out += ' ';
    out += std::to_string(tree.parent[v]);
    out += ' ';
    put_double(out, tree.edge_length[v]);
    out += ' ';
    put_double(out, tree.mass[v]);
    out += '\n';
  }
  os << out;
}

MetricTree read_tree(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ParameterError("tree file is empty");
  std::istringstream header(line);
  std::string tn, troot, tmarked;
  header >> tn >> troot >> tmarked;
  if (tn.empty() || troot.empty()) throw ParameterError("tree header must be 'n root [marked]'");
  const long long n = parse_int(tn);
  if (n <= 0) throw ParameterError("tree must have at least one vertex");
  MetricTree tree;
  tree.root = static_cast<Vertex>(parse_int(troot));
  if (!tmarked.empty()) tree.marked = static_cast<Vertex>(parse_int(tmarked));
  tree.parent.assign(n, kNoVertex);
  tree.edge_length.assign(n, 0.0);
  tree.mass.assign(n, 0.0);
  std::vector<char> seen(n, 0);
  std::string ti, tp, tl, tm;
  for (long long row = 0; row < n; ++row) {
    if (!std::getline(is, line)) throw ParameterError("tree file truncated");
    std::istringstream ls(line);
    ls >> ti >> tp >> tl >> tm;
    if (tm.empty()) throw ParameterError("tree row must be 'index parent edge_length mass'");
    const long long i = parse_int(ti);
    if (i < 0 || i >= n || seen[i]) throw ParameterError("bad or duplicate vertex index in tree file");
    seen[i] = 1;
    tree.parent[i] = static_cast<Vertex>(parse_int(tp));
    tree.edge_length[i] = parse_double(tl);
    tree.mass[i] = parse_double(tm);
    tm.clear();
  }
  tree.validate();
  return tree;
}

}  // namespace stabletree
