#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "disco/network.hpp"

namespace disco {

// Per-node data-plane state. Byte model, identical for every protocol:
//   route entry (landmark, vicinity, cluster, path vector): name + 1 label byte
//   used label-map entry: 1 byte
//   resolution entry, group address entry: name + measured address bytes
//   overlay link: name
//   vrr path entry: two endpoint names + 1 label byte
struct StateBreakdown {
  std::size_t landmark_routes = 0;
  std::size_t vicinity_or_cluster = 0;
  std::size_t label_map_used = 0;
  std::size_t resolution_entries = 0;
  std::size_t group_addresses = 0;
  std::size_t overlay_links = 0;
  std::size_t vrr_entries = 0;
  std::size_t bytes_v4 = 0;
  std::size_t bytes_v6 = 0;

  std::size_t total() const {
    return landmark_routes + vicinity_or_cluster + label_map_used + resolution_entries + group_addresses +
           overlay_links + vrr_entries;
  }
};

std::vector<StateBreakdown> measure_state(const Network& net);

struct StateSummary {
  double mean_entries = 0.0;
  std::size_t max_entries = 0;
  double mean_bytes_v4 = 0.0;
  std::size_t max_bytes_v4 = 0;
  double mean_bytes_v6 = 0.0;
  std::size_t max_bytes_v6 = 0;
};
StateSummary summarize_state(const std::vector<StateBreakdown>& state);

// All ordered pairs below 512 nodes, otherwise `count` uniform pairs with s != t.
std::vector<std::pair<NodeId, NodeId>> sample_pairs(std::size_t n, std::size_t count, std::uint64_t seed);

struct StretchSample {
  NodeId s = kNoNode;
  NodeId t = kNoNode;
  Distance shortest = 0.0;
  double first = 0.0;
  double later = 0.0;
  Heuristic heuristic = Heuristic::none;
  bool fallback = false;
  bool delivered = true;
};

struct StretchReport {
  std::vector<StretchSample> samples;
  std::size_t unreachable = 0;
  std::size_t fallbacks = 0;
  // Each sample breaking a stretch bound, as a readable message.
  std::vector<std::string> violations;

  double mean_first() const;
  double mean_later() const;
  double max_first() const;
  double max_later() const;
};

// Routes every pair on the first and later packet paths and checks stretch
// >= 1 everywhere, plus later <= 3 for nddisco/disco and first <= 7 for disco.
StretchReport measure_stretch(const Network& net, const std::vector<std::pair<NodeId, NodeId>>& pairs,
                              Heuristic heuristic);
StretchReport measure_stretch(const Network& net, const std::vector<std::pair<NodeId, NodeId>>& pairs);
// Same, reusing shortest distances from pair_distances().
StretchReport measure_stretch(const Network& net, const std::vector<std::pair<NodeId, NodeId>>& pairs,
                              Heuristic heuristic, const std::vector<Distance>& shortest);
std::vector<Distance> pair_distances(const Topology& topo, const std::vector<std::pair<NodeId, NodeId>>& pairs);

// Pairs with t outside V(s) where d(l_t, t) > 2 d(s, t).
std::size_t useful_fact_violations(const RoutingTables& tables, const std::vector<std::pair<NodeId, NodeId>>& pairs);

// One uniformly drawn destination per source, in source order.
std::vector<NodeId> congestion_destinations(std::size_t n, std::uint64_t seed);

struct CongestionMap {
  std::vector<std::uint64_t> edge_counts;  // indexed like Topology::edges()
  std::uint64_t total_hops = 0;
};
CongestionMap measure_congestion(const Network& net, std::uint64_t seed);
CongestionMap shortest_path_congestion(const Topology& topo, std::uint64_t seed);

// Nearest-rank quantile of per-edge counts, q in [0, 1].
double congestion_quantile(const CongestionMap& map, double q);

// Sorted distinct values with their cumulative fraction.
std::vector<std::pair<double, double>> emit_cdf(std::vector<double> values);

// Shortest decimal that round-trips.
std::string format_double(double x);

void write_state_csv(std::ostream& out, const Topology& topo, const std::vector<StateBreakdown>& state);
void write_stretch_csv(std::ostream& out, const Topology& topo, const StretchReport& report);
void write_congestion_csv(std::ostream& out, const Topology& topo, const CongestionMap& map);
void write_messages_csv(std::ostream& out, const Topology& topo, const MessageCounters& counters);
void write_cdf_csv(std::ostream& out, const std::vector<std::pair<double, double>>& cdf);

}  // namespace disco
