#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "disco/nddisco.hpp"
#include "disco/resolution.hpp"

namespace disco {

// Full shortest-path tables. next_hop[t][v] is v's next hop toward t; tables
// are only materialized up to `table_cap` nodes.
struct PathVectorState {
  std::size_t nodes = 0;
  bool has_tables = false;
  std::vector<std::vector<NodeId>> next_hop;
  std::vector<std::vector<Distance>> dist;

  std::size_t entries_per_node() const { return nodes == 0 ? 0 : nodes - 1; }
  bool operator==(const PathVectorState&) const = default;
};

PathVectorState pathvector_converge(const Topology& topo, std::size_t table_cap = 2048);
RouteResult pathvector_route(const Topology& topo, const PathVectorState& state, NodeId s, NodeId t);

class S4State : public RouteKnowledge {
 public:
  S4State(const Topology& topo, LandmarkSet landmarks, LandmarkRoutes routes,
          std::vector<std::vector<RouteEntry>> clusters);

  const Topology& topology() const override { return *topo_; }
  std::optional<Distance> known_distance(NodeId x, NodeId y) const override;
  Path known_path(NodeId x, NodeId y) const override;

  const LandmarkSet& landmarks() const { return landmarks_; }
  const LandmarkRoutes& routes() const { return routes_; }
  // Sorted by node id.
  std::span<const RouteEntry> cluster(NodeId v) const { return clusters_[v]; }
  const RouteEntry* find_cluster(NodeId v, NodeId w) const;
  // d(w, closest landmark of w).
  Distance radius(NodeId w) const;
  const Address& address(NodeId v) const { return addresses_[v]; }
  const std::vector<Address>& addresses() const { return addresses_; }

 private:
  const Topology* topo_;
  LandmarkSet landmarks_;
  LandmarkRoutes routes_;
  std::vector<std::vector<RouteEntry>> clusters_;
  std::vector<Address> addresses_;
};

// Cluster C(v) = {w : d(v,w) < d(w, l_w)}.
std::vector<std::vector<RouteEntry>> compute_clusters(const Topology& topo, const LandmarkSet& landmarks,
                                                      const LandmarkRoutes& routes);
S4State s4_converge(const Topology& topo, const LandmarkSet& landmarks);
ResolutionDb build_resolution_db(const S4State& state, unsigned virtual_points = 32, double now = 0.0);

// Later packets: s -> l_t -> t, shortcut with the given heuristic.
RouteResult s4_route(const S4State& state, NodeId s, NodeId t, Heuristic h);
// First packets: detour through the resolution owner of t's name.
RouteResult s4_first_packet(const S4State& state, const ResolutionDb& db, NodeId s, NodeId t, Heuristic h);

struct VrrPath {
  NodeId a = kNoNode;
  NodeId b = kNoNode;
  Path nodes;  // a ... b
  bool operator==(const VrrPath&) const = default;
};

struct VrrState {
  unsigned r = 4;
  std::vector<NodeId> join_order;
  std::vector<std::vector<NodeId>> vset;  // sorted by node id
  std::vector<VrrPath> paths;             // live virtual-neighbor paths
  std::vector<std::vector<std::uint32_t>> through;  // path ids traversing each node

  std::size_t entries(NodeId v) const { return through[v].size(); }
};

VrrState vrr_build(const Topology& topo, std::uint64_t seed, unsigned r = 4);
RouteResult vrr_route(const Topology& topo, const VrrState& state, NodeId s, NodeId t);

}  // namespace disco
