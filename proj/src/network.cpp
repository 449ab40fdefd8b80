#include "disco/network.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace disco {

namespace {

constexpr std::pair<Protocol, std::string_view> kProtocolNames[] = {
    {Protocol::path_vector, "pathvector"}, {Protocol::s4, "s4"},       {Protocol::vrr, "vrr"},
    {Protocol::nddisco, "nddisco"},        {Protocol::disco, "disco"},
};

}  // namespace

std::string_view to_string(Protocol p) {
  for (const auto& [k, name] : kProtocolNames) {
    if (k == p) return name;
  }
  return "disco";
}

Protocol parse_protocol(std::string_view text) {
  for (const auto& [k, name] : kProtocolNames) {
    if (name == text) return k;
  }
  throw Error(ErrorCode::invalid_argument, "unknown protocol '" + std::string(text) + "'");
}

std::array<std::uint64_t, MessageCounters::kClasses> MessageCounters::totals() const {
  std::array<std::uint64_t, kClasses> t{};
  for (const auto& row : per_node) {
    for (std::size_t c = 0; c < kClasses; ++c) t[c] += row[c];
  }
  return t;
}

std::uint64_t MessageCounters::total() const {
  const auto t = totals();
  return std::accumulate(t.begin(), t.end(), std::uint64_t{0});
}

double MessageCounters::mean_per_node() const {
  return per_node.empty() ? 0.0 : static_cast<double>(total()) / static_cast<double>(per_node.size());
}

Network run_static(const Topology& topo, Protocol protocol, const ProtocolConfig& config, std::uint64_t seed) {
  Network net;
  net.protocol = protocol;
  net.topology = &topo;
  net.seed = seed;
  net.config = config;
  switch (protocol) {
    case Protocol::path_vector:
      net.path_vector = std::make_unique<PathVectorState>(pathvector_converge(topo, config.pathvector_table_cap));
      return net;
    case Protocol::vrr:
      if (topo.node_count() > config.vrr_cap) {
        throw Error(ErrorCode::infeasible, "vrr is limited to " + std::to_string(config.vrr_cap) + " nodes");
      }
      net.vrr = std::make_unique<VrrState>(vrr_build(topo, seed));
      return net;
    default:
      break;
  }
  net.estimates = estimate_n(topo, config.error_model, seed);
  net.landmarks = elect_landmarks(topo, net.estimates, seed);
  if (protocol == Protocol::s4) {
    net.s4 = std::make_unique<S4State>(s4_converge(topo, net.landmarks));
    net.resolution = std::make_unique<ResolutionDb>(build_resolution_db(*net.s4, config.virtual_points));
    return net;
  }
  net.tables = std::make_unique<RoutingTables>(converge(topo, net.landmarks, net.estimates));
  net.resolution = std::make_unique<ResolutionDb>(build_resolution_db(*net.tables, config.virtual_points));
  if (protocol == Protocol::disco) {
    net.groups = std::make_unique<GroupState>(build_groups(topo, net.estimates, config.fingers, seed));
  }
  return net;
}

RouteResult first_packet_route(const Network& net, NodeId s, NodeId t, Heuristic h) {
  const Topology& topo = *net.topology;
  switch (net.protocol) {
    case Protocol::path_vector: {
      RouteResult r = pathvector_route(topo, *net.path_vector, s, t);
      r.phase = RouteResult::Phase::first_packet;
      return r;
    }
    case Protocol::vrr:
      return vrr_route(topo, *net.vrr, s, t);
    case Protocol::s4:
      return s4_first_packet(*net.s4, *net.resolution, s, t, net.config.s4_heuristic);
    case Protocol::nddisco:
      return route_first_packet_nd(*net.tables, s, net.tables->address(t), h);
    case Protocol::disco:
      return route_first_packet_disco(*net.tables, *net.groups, *net.resolution, s, t, h);
  }
  throw Error(ErrorCode::invalid_argument, "unknown protocol");
}

RouteResult first_packet_route(const Network& net, NodeId s, NodeId t) {
  return first_packet_route(net, s, t, net.config.heuristic);
}

RouteResult later_packet_route(const Network& net, NodeId s, NodeId t) {
  const Topology& topo = *net.topology;
  switch (net.protocol) {
    case Protocol::path_vector:
      return pathvector_route(topo, *net.path_vector, s, t);
    case Protocol::vrr: {
      RouteResult r = vrr_route(topo, *net.vrr, s, t);
      r.phase = RouteResult::Phase::later_packet;
      return r;
    }
    case Protocol::s4:
      return s4_route(*net.s4, s, t, net.config.s4_heuristic);
    case Protocol::nddisco:
    case Protocol::disco:
      return route_later_packet_nd(*net.tables, s, t, net.config.heuristic);
  }
  throw Error(ErrorCode::invalid_argument, "unknown protocol");
}

namespace {

template <class A, class B>
bool same_range(const A& a, const B& b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end());
}

std::string diff_tables(const Topology& topo, const RoutingTables& a, const RoutingTables& b) {
  if (a.routes() != b.routes()) return "landmark routes differ";
  for (NodeId v = 0; v < topo.node_count(); ++v) {
    if (!same_range(a.vicinity(v), b.vicinity(v))) return "vicinity of '" + topo.name(v) + "' differs";
    if (!(a.address(v) == b.address(v))) return "address of '" + topo.name(v) + "' differs";
    if (!same_range(a.used_labels(v), b.used_labels(v))) return "label map of '" + topo.name(v) + "' differs";
  }
  return {};
}

}  // namespace

std::string diff_networks(const Network& a, const Network& b) {
  if (a.protocol != b.protocol) return "protocols differ";
  if (a.topology != b.topology) return "topologies differ";
  const Topology& topo = *a.topology;
  if (a.landmarks.members != b.landmarks.members) return "landmark sets differ";
  if (a.estimates != b.estimates) return "size estimates differ";
  if (bool(a.tables) != bool(b.tables)) return "routing tables present on one side only";
  if (a.tables) {
    if (auto d = diff_tables(topo, *a.tables, *b.tables); !d.empty()) return d;
  }
  if (bool(a.resolution) != bool(b.resolution)) return "resolution database present on one side only";
  if (a.resolution && !(*a.resolution == *b.resolution)) return "resolution shards differ";
  if (bool(a.groups) != bool(b.groups)) return "group state present on one side only";
  if (a.groups) {
    if (a.groups->k != b.groups->k) return "group prefixes differ";
    if (!(a.groups->overlay == b.groups->overlay)) return "overlay links differ";
    for (NodeId v = 0; v < topo.node_count(); ++v) {
      if (!(a.groups->dissemination.tables[v] == b.groups->dissemination.tables[v])) {
        return "address table of '" + topo.name(v) + "' differs";
      }
    }
  }
  if (bool(a.s4) != bool(b.s4)) return "s4 state present on one side only";
  if (a.s4) {
    if (a.s4->routes() != b.s4->routes()) return "s4 landmark routes differ";
    for (NodeId v = 0; v < topo.node_count(); ++v) {
      if (!same_range(a.s4->cluster(v), b.s4->cluster(v))) return "cluster of '" + topo.name(v) + "' differs";
    }
    if (a.s4->addresses() != b.s4->addresses()) return "s4 addresses differ";
  }
  if (bool(a.path_vector) != bool(b.path_vector)) return "path vector state present on one side only";
  if (a.path_vector && !(*a.path_vector == *b.path_vector)) return "path vector tables differ";
  if (bool(a.vrr) != bool(b.vrr)) return "vrr state present on one side only";
  if (a.vrr && a.vrr->paths != b.vrr->paths) return "vrr paths differ";
  return {};
}

}  // namespace disco
