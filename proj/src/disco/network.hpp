#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "disco/baselines.hpp"
#include "disco/nameplane.hpp"
#include "disco/nddisco.hpp"
#include "disco/resolution.hpp"
#include "disco/sloppygroup.hpp"

namespace disco {

enum class Protocol { path_vector, s4, vrr, nddisco, disco };

std::string_view to_string(Protocol p);
Protocol parse_protocol(std::string_view text);

struct ProtocolConfig {
  Heuristic heuristic = Heuristic::no_path_knowledge;
  Heuristic s4_heuristic = Heuristic::to_destination;
  unsigned fingers = 1;
  ErrorModel error_model;
  unsigned virtual_points = 32;
  std::size_t des_cap = 2048;
  std::uint64_t event_budget = 2'000'000'000ULL;
  std::size_t vrr_cap = 1024;
  std::size_t pathvector_table_cap = 2048;
};

struct MessageCounters {
  enum Class : std::size_t { route = 0, resolution, overlay, dissemination, kClasses };
  static constexpr std::array<std::string_view, kClasses> kNames{"route", "resolution", "overlay", "dissemination"};

  std::vector<std::array<std::uint64_t, kClasses>> per_node;

  explicit MessageCounters(std::size_t n = 0) : per_node(n, std::array<std::uint64_t, kClasses>{}) {}
  void add(NodeId v, Class c, std::uint64_t count = 1) { per_node[v][c] += count; }
  std::array<std::uint64_t, kClasses> totals() const;
  std::uint64_t total() const;
  double mean_per_node() const;
  bool operator==(const MessageCounters&) const = default;
};

// Converged state of one protocol on one topology.
struct Network {
  Protocol protocol = Protocol::disco;
  const Topology* topology = nullptr;
  std::uint64_t seed = 0;
  ProtocolConfig config;
  std::vector<double> estimates;
  LandmarkSet landmarks;
  std::unique_ptr<RoutingTables> tables;
  std::unique_ptr<ResolutionDb> resolution;
  std::unique_ptr<GroupState> groups;
  std::unique_ptr<S4State> s4;
  std::unique_ptr<VrrState> vrr;
  std::unique_ptr<PathVectorState> path_vector;
  std::optional<MessageCounters> messages;
  // Dissemination first-delivery hop counts, DES runs only.
  std::optional<HopStats> announcement_hops;
};

Network run_static(const Topology& topo, Protocol protocol, const ProtocolConfig& config, std::uint64_t seed);

RouteResult first_packet_route(const Network& net, NodeId s, NodeId t);
RouteResult first_packet_route(const Network& net, NodeId s, NodeId t, Heuristic h);
RouteResult later_packet_route(const Network& net, NodeId s, NodeId t);

// Empty when the converged states agree field for field, else the first difference.
std::string diff_networks(const Network& a, const Network& b);

}  // namespace disco
