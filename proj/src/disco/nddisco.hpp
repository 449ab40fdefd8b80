#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "disco/common.hpp"
#include "disco/nameplane.hpp"
#include "disco/shortcut.hpp"
#include "disco/topology.hpp"

namespace disco {

// ceil(sqrt(n log2 n)), clamped to n-1.
std::size_t vicinity_size(double n_est);

struct RouteEntry {
  NodeId node = kNoNode;
  NodeId next_hop = kNoNode;
  Distance distance = kInfinity;
  bool operator==(const RouteEntry&) const = default;
};

struct ExplicitRoute {
  std::vector<std::uint32_t> labels;
  std::size_t bit_size = 0;
  std::size_t byte_size() const { return (bit_size + 7) / 8; }
  bool operator==(const ExplicitRoute&) const = default;
};

// One label per forwarding node: the index of the next hop among the node's
// neighbors in NameHash order, ceil(log2 degree) bits wide.
ExplicitRoute encode_explicit_route(const Topology& topo, std::span<const NodeId> path);
Path decode_explicit_route(const Topology& topo, NodeId start, std::span<const std::uint32_t> labels);

struct Address {
  NodeId landmark = kNoNode;
  ExplicitRoute route;
  // Landmark name plus the packed route.
  std::size_t byte_size(std::size_t name_bytes) const { return name_bytes + route.byte_size(); }
  bool operator==(const Address&) const = default;
};

enum class ControlPlaneMode { full, forgetful };

class RoutingTables;

// Per-landmark shortest-path trees; next_hop[slot][v] is v's next hop toward
// the landmark (the landmark itself maps to kNoNode).
struct LandmarkRoutes {
  std::vector<std::vector<Distance>> dist;
  std::vector<std::vector<NodeId>> next_hop;
  bool operator==(const LandmarkRoutes&) const = default;
};

LandmarkRoutes landmark_routes(const Topology& topo, const LandmarkSet& landmarks);

// Closest landmark (ties by NameHash) and the landmark-to-node route, per node.
std::vector<Address> closest_landmark_addresses(const Topology& topo, const LandmarkSet& landmarks,
                                                const LandmarkRoutes& routes);
Address make_address(const RoutingTables& tables, NodeId v);

class RoutingTables : public RouteKnowledge {
 public:
  RoutingTables(const Topology& topo, LandmarkSet landmarks, std::vector<double> estimates, LandmarkRoutes routes,
                std::vector<std::vector<RouteEntry>> vicinity);

  const Topology& topology() const override { return *topo_; }
  std::optional<Distance> known_distance(NodeId x, NodeId y) const override;
  Path known_path(NodeId x, NodeId y) const override;

  const LandmarkSet& landmarks() const { return landmarks_; }
  const std::vector<double>& estimates() const { return estimates_; }
  const LandmarkRoutes& routes() const { return routes_; }

  // Sorted by node id.
  std::span<const RouteEntry> vicinity(NodeId v) const {
    return {vicinity_.data() + vicinity_offsets_[v], vicinity_.data() + vicinity_offsets_[v + 1]};
  }
  const RouteEntry* find_vicinity(NodeId v, NodeId w) const;
  bool in_vicinity(NodeId v, NodeId w) const { return find_vicinity(v, w) != nullptr; }

  Distance landmark_distance(NodeId v, NodeId landmark) const;
  NodeId landmark_next_hop(NodeId v, NodeId landmark) const;

  const Address& address(NodeId v) const { return addresses_[v]; }
  NodeId closest_landmark(NodeId v) const { return addresses_[v].landmark; }

  // Labels of v that some node's address route actually traverses.
  std::span<const std::uint32_t> used_labels(NodeId v) const {
    return {used_labels_.data() + label_offsets_[v], used_labels_.data() + label_offsets_[v + 1]};
  }

  std::size_t control_plane_entries(NodeId v, ControlPlaneMode mode) const;

 private:
  const Topology* topo_;
  LandmarkSet landmarks_;
  std::vector<double> estimates_;
  LandmarkRoutes routes_;
  std::vector<std::size_t> vicinity_offsets_;
  std::vector<RouteEntry> vicinity_;
  std::vector<Address> addresses_;
  std::vector<std::size_t> label_offsets_;
  std::vector<std::uint32_t> used_labels_;
};

// Nearest vicinity_size(estimate) nodes of every node, ordered by
// (distance, tie_rank), with destination-rooted next hops.
std::vector<std::vector<RouteEntry>> compute_vicinities(const Topology& topo, std::span<const double> estimates);

// The fixpoint the path-vector exchange converges to.
RoutingTables converge(const Topology& topo, const LandmarkSet& landmarks, std::span<const double> estimates);

struct RouteResult {
  enum class Phase { first_packet, later_packet };
  Path hops;
  Distance length = 0.0;
  double stretch = std::nan("");
  Phase phase = Phase::first_packet;
  Heuristic heuristic = Heuristic::none;
  bool fallback = false;
  bool delivered = true;
};

RouteResult make_route(const Topology& topo, Path hops, RouteResult::Phase phase, Heuristic h);

// s..t without shortcutting; t is the endpoint the address decodes to.
Path nd_base_route(const RoutingTables& tables, NodeId s, const Address& t_address);
RouteResult route_first_packet_nd(const RoutingTables& tables, NodeId s, const Address& t_address, Heuristic h);
std::optional<Path> handshake(const RoutingTables& tables, NodeId s, NodeId t);
RouteResult route_later_packet_nd(const RoutingTables& tables, NodeId s, NodeId t, Heuristic h);

}  // namespace disco
