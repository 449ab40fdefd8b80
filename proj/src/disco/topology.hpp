#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "disco/common.hpp"
#include "disco/hash.hpp"
#include "disco/rng.hpp"

namespace disco {

struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  double weight = 1.0;
};

struct Neighbor {
  NodeId node = 0;
  double weight = 1.0;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Snaps a weight onto the 2^-32 grid so that path sums are exact and
// equal-length comparisons are reliable.
double quantize_weight(double w);

std::vector<std::vector<NodeId>> connected_components(std::size_t n, std::span<const Edge> edges);

class Topology {
 public:
  // Duplicate edges collapse to the minimum weight. Throws on empty or
  // duplicate names, self loops, nonpositive weights and disconnected input.
  Topology(std::vector<std::string> names, std::vector<Edge> edges, std::vector<Point> coordinates = {});

  std::size_t node_count() const { return names_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  const std::string& name(NodeId v) const { return names_[v]; }
  NameHash hash(NodeId v) const { return hashes_[v]; }
  std::uint32_t name_rank(NodeId v) const { return name_rank_[v]; }

  // Neighbors in ascending NameHash order; a neighbor's position is its label.
  std::span<const Neighbor> neighbors(NodeId v) const {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }
  std::size_t degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }

  std::optional<NodeId> find(std::string_view name) const;
  NodeId require(std::string_view name) const;

  // kInfinity if u and v are not adjacent.
  double edge_weight(NodeId u, NodeId v) const;
  std::optional<std::uint32_t> label_of(NodeId from, NodeId to) const;
  std::size_t edge_index(NodeId u, NodeId v) const;

  // Canonical edges (u < v), sorted.
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Point>& coordinates() const { return coordinates_; }
  bool unit_weights() const { return unit_weights_; }

  double path_length(std::span<const NodeId> path) const;
  bool is_walk(std::span<const NodeId> path) const;

 private:
  struct IdEntry {
    NodeId node;
    std::uint32_t edge;
  };

  std::vector<std::string> names_;
  std::vector<NameHash> hashes_;
  std::vector<std::uint32_t> name_rank_;
  std::unordered_map<std::string_view, NodeId> index_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> adjacency_;
  std::vector<IdEntry> by_id_;
  std::vector<Point> coordinates_;
  bool unit_weights_ = true;
};

// Generators. All are deterministic in (params, seed).
Topology gen_gnm(std::size_t n, double avg_degree, std::uint64_t seed);
Topology gen_geometric(std::size_t n, double avg_degree, std::uint64_t seed);
Topology gen_s4_adversarial(std::size_t sqrt_n);

Topology parse_edgelist(std::istream& in, bool weighted, bool largest_component);
Topology load_edgelist(const std::string& path, bool weighted, bool largest_component);
void write_edgelist(const Topology& topo, std::ostream& out, bool weighted);

struct ShortestPathTree {
  NodeId source = kNoNode;
  std::vector<Distance> dist;
  // Predecessor toward the source; among equal-distance predecessors the one
  // with the smallest name wins.
  std::vector<NodeId> parent;
};

ShortestPathTree shortest_path_tree(const Topology& topo, NodeId source);

// source ... target along the tree.
Path tree_path(const ShortestPathTree& tree, NodeId target);

struct PathResult {
  Path path;
  Distance distance = 0.0;
};

PathResult shortest_path(const Topology& topo, NodeId src, NodeId dst);
PathResult shortest_path(const Topology& topo, std::string_view src, std::string_view dst);

// Secondary order among equidistant nodes. Mixing the hash keeps it global
// (so vicinities stay consistent along shortest paths) without favouring any
// hash prefix, which would starve some sloppy groups at vicinity boundaries.
inline std::uint64_t tie_rank(NameHash h) { return splitmix64(h.value); }

// Reusable Dijkstra that settles nodes in (distance, tie_rank) order and can
// stop early. first_hop() is the source's neighbor on the discovered path.
class DijkstraWorkspace {
 public:
  explicit DijkstraWorkspace(std::size_t n);

  // visit(node, dist) is called for each settled node including the source;
  // returning false stops the search. Nodes at distance >= radius are not settled.
  template <class Visit>
  void run(const Topology& topo, NodeId source, Distance radius, Visit&& visit);

  Distance dist(NodeId v) const { return dist_[v]; }
  NodeId parent(NodeId v) const { return parent_[v]; }
  NodeId first_hop(NodeId v) const { return first_hop_[v]; }

 private:
  struct Item {
    Distance d;
    std::uint64_t h;
    NodeId v;
    bool operator>(const Item& o) const { return d != o.d ? d > o.d : h > o.h; }
  };
  void reset();
  void push(Item item);
  Item pop();

  std::vector<Distance> dist_;
  std::vector<NodeId> parent_;
  std::vector<NodeId> first_hop_;
  std::vector<char> settled_;
  std::vector<NodeId> touched_;
  std::vector<Item> heap_;
};

template <class Visit>
void DijkstraWorkspace::run(const Topology& topo, NodeId source, Distance radius, Visit&& visit) {
  reset();
  dist_[source] = 0.0;
  first_hop_[source] = source;
  touched_.push_back(source);
  push({0.0, tie_rank(topo.hash(source)), source});
  while (!heap_.empty()) {
    const Item top = pop();
    if (settled_[top.v] || top.d != dist_[top.v]) continue;
    if (top.d >= radius) break;
    settled_[top.v] = 1;
    if (!visit(top.v, top.d)) break;
    for (const Neighbor& nb : topo.neighbors(top.v)) {
      if (settled_[nb.node]) continue;
      const Distance nd = top.d + nb.weight;
      const Distance cur = dist_[nb.node];
      if (cur == kInfinity) touched_.push_back(nb.node);
      if (nd < cur) {
        dist_[nb.node] = nd;
        parent_[nb.node] = top.v;
        first_hop_[nb.node] = top.v == source ? nb.node : first_hop_[top.v];
        push({nd, tie_rank(topo.hash(nb.node)), nb.node});
      } else if (nd == cur && topo.name_rank(top.v) < topo.name_rank(parent_[nb.node])) {
        parent_[nb.node] = top.v;
        first_hop_[nb.node] = top.v == source ? nb.node : first_hop_[top.v];
      }
    }
  }
}

// Caches single-source trees. Safe to share between threads.
class DistanceOracle {
 public:
  explicit DistanceOracle(const Topology& topo, std::size_t cache_limit = 64);

  Distance distance(NodeId u, NodeId v) const;
  Path path(NodeId u, NodeId v) const;
  std::shared_ptr<const ShortestPathTree> tree(NodeId source) const;

 private:
  const Topology& topo_;
  std::size_t cache_limit_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<NodeId, std::shared_ptr<const ShortestPathTree>> cache_;
  mutable std::vector<NodeId> order_;
};

}  // namespace disco
