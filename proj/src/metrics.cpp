#include "disco/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <set>

#include "disco/rng.hpp"

namespace disco {

namespace {

constexpr double kTolerance = 1e-9;

// Distinct (node, label) pairs that some address route forwards over.
std::vector<std::size_t> used_label_counts(const Topology& topo, const std::vector<Address>& addresses) {
  std::vector<std::set<std::uint32_t>> used(topo.node_count());
  for (const Address& a : addresses) {
    NodeId cur = a.landmark;
    for (std::uint32_t label : a.route.labels) {
      used[cur].insert(label);
      cur = topo.neighbors(cur)[label].node;
    }
  }
  std::vector<std::size_t> out(used.size());
  for (std::size_t v = 0; v < used.size(); ++v) out[v] = used[v].size();
  return out;
}

std::size_t shard_bytes(const ResolutionDb& db, NodeId l, std::size_t name_bytes) {
  std::size_t b = 0;
  for (const auto& [key, e] : db.shard(l)) b += name_bytes + e.address.byte_size(name_bytes);
  return b;
}

void add_route_bytes(StateBreakdown& s, std::size_t entries) {
  s.bytes_v4 += entries * (4 + 1);
  s.bytes_v6 += entries * (16 + 1);
}

}  // namespace

std::vector<StateBreakdown> measure_state(const Network& net) {
  const Topology& topo = *net.topology;
  const std::size_t n = topo.node_count();
  std::vector<StateBreakdown> out(n);

  switch (net.protocol) {
    case Protocol::path_vector:
      for (auto& s : out) {
        s.vicinity_or_cluster = n - 1;
        add_route_bytes(s, n - 1);
      }
      return out;
    case Protocol::vrr:
      for (NodeId v = 0; v < n; ++v) {
        out[v].vrr_entries = net.vrr->entries(v);
        out[v].bytes_v4 = out[v].vrr_entries * (2 * 4 + 1);
        out[v].bytes_v6 = out[v].vrr_entries * (2 * 16 + 1);
      }
      return out;
    default:
      break;
  }

  const std::size_t landmarks = net.landmarks.size();
  std::vector<std::size_t> labels;
  if (net.s4) {
    labels = used_label_counts(topo, net.s4->addresses());
  } else {
    labels.resize(n);
    for (NodeId v = 0; v < n; ++v) labels[v] = net.tables->used_labels(v).size();
  }
  for (NodeId v = 0; v < n; ++v) {
    StateBreakdown& s = out[v];
    s.landmark_routes = landmarks - (net.landmarks.contains(v) ? 1 : 0);
    s.vicinity_or_cluster = net.s4 ? net.s4->cluster(v).size() : net.tables->vicinity(v).size();
    s.label_map_used = labels[v];
    add_route_bytes(s, s.landmark_routes + s.vicinity_or_cluster);
    s.bytes_v4 += s.label_map_used;
    s.bytes_v6 += s.label_map_used;
    if (net.landmarks.contains(v)) {
      s.resolution_entries = net.resolution->shard_size(v);
      s.bytes_v4 += shard_bytes(*net.resolution, v, 4);
      s.bytes_v6 += shard_bytes(*net.resolution, v, 16);
    }
    if (net.groups) {
      const auto& table = net.groups->dissemination.tables[v];
      s.group_addresses = table.size();
      for (const AddressEntry& e : table.entries()) {
        const Address& a = net.tables->address(e.origin);
        s.bytes_v4 += 4 + a.byte_size(4);
        s.bytes_v6 += 16 + a.byte_size(16);
      }
      s.overlay_links = net.groups->overlay.neighbors[v].size();
      s.bytes_v4 += s.overlay_links * 4;
      s.bytes_v6 += s.overlay_links * 16;
    }
  }
  return out;
}

StateSummary summarize_state(const std::vector<StateBreakdown>& state) {
  StateSummary out;
  if (state.empty()) return out;
  double entries = 0, v4 = 0, v6 = 0;
  for (const auto& s : state) {
    entries += static_cast<double>(s.total());
    v4 += static_cast<double>(s.bytes_v4);
    v6 += static_cast<double>(s.bytes_v6);
    out.max_entries = std::max(out.max_entries, s.total());
    out.max_bytes_v4 = std::max(out.max_bytes_v4, s.bytes_v4);
    out.max_bytes_v6 = std::max(out.max_bytes_v6, s.bytes_v6);
  }
  const double n = static_cast<double>(state.size());
  out.mean_entries = entries / n;
  out.mean_bytes_v4 = v4 / n;
  out.mean_bytes_v6 = v6 / n;
  return out;
}

std::vector<std::pair<NodeId, NodeId>> sample_pairs(std::size_t n, std::size_t count, std::uint64_t seed) {
  if (n < 2) throw Error(ErrorCode::invalid_argument, "pair sampling needs two nodes");
  std::vector<std::pair<NodeId, NodeId>> out;
  if (n < 512) {
    out.reserve(n * (n - 1));
    for (NodeId s = 0; s < n; ++s) {
      for (NodeId t = 0; t < n; ++t) {
        if (s != t) out.emplace_back(s, t);
      }
    }
    return out;
  }
  Rng rng(derive_seed(seed, streams::pairs));
  out.reserve(count);
  while (out.size() < count) {
    const auto s = static_cast<NodeId>(rng.below(n));
    const auto t = static_cast<NodeId>(rng.below(n));
    if (s != t) out.emplace_back(s, t);
  }
  return out;
}

double StretchReport::mean_first() const {
  double sum = 0;
  for (const auto& s : samples) sum += s.first;
  return samples.empty() ? 0.0 : sum / static_cast<double>(samples.size());
}

double StretchReport::mean_later() const {
  double sum = 0;
  for (const auto& s : samples) sum += s.later;
  return samples.empty() ? 0.0 : sum / static_cast<double>(samples.size());
}

double StretchReport::max_first() const {
  double m = 0;
  for (const auto& s : samples) m = std::max(m, s.first);
  return m;
}

double StretchReport::max_later() const {
  double m = 0;
  for (const auto& s : samples) m = std::max(m, s.later);
  return m;
}

std::vector<Distance> pair_distances(const Topology& topo, const std::vector<std::pair<NodeId, NodeId>>& pairs) {
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pairs[a].first < pairs[b].first; });
  std::vector<Distance> shortest(pairs.size());
  DijkstraWorkspace ws(topo.node_count());
  for (std::size_t i = 0; i < order.size();) {
    const NodeId s = pairs[order[i]].first;
    ws.run(topo, s, kInfinity, [](NodeId, Distance) { return true; });
    for (; i < order.size() && pairs[order[i]].first == s; ++i) shortest[order[i]] = ws.dist(pairs[order[i]].second);
  }
  return shortest;
}

StretchReport measure_stretch(const Network& net, const std::vector<std::pair<NodeId, NodeId>>& pairs,
                              Heuristic heuristic) {
  return measure_stretch(net, pairs, heuristic, pair_distances(*net.topology, pairs));
}

StretchReport measure_stretch(const Network& net, const std::vector<std::pair<NodeId, NodeId>>& pairs,
                              Heuristic heuristic, const std::vector<Distance>& shortest) {
  const Topology& topo = *net.topology;
  if (shortest.size() != pairs.size()) throw Error(ErrorCode::invalid_argument, "one distance per pair expected");
  const bool bounded_later = net.protocol == Protocol::nddisco || net.protocol == Protocol::disco;
  StretchReport report;
  report.samples.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto [s, t] = pairs[i];
    if (s == t) throw Error(ErrorCode::invalid_argument, "stretch pairs must have distinct endpoints");
    const RouteResult first = first_packet_route(net, s, t, heuristic);
    const RouteResult later = later_packet_route(net, s, t);
    StretchSample sample{s, t, shortest[i], first.length / shortest[i], later.length / shortest[i], heuristic,
                         first.fallback, first.delivered && later.delivered};
    if (!sample.delivered) ++report.unreachable;
    if (sample.fallback) ++report.fallbacks;
    auto flag = [&](const char* what, double value) {
      report.violations.push_back(std::string(what) + " stretch " + format_double(value) + " for " + topo.name(s) +
                                  " -> " + topo.name(t));
    };
    if (sample.delivered) {
      if (sample.first < 1.0 - kTolerance) flag("first-packet", sample.first);
      if (sample.later < 1.0 - kTolerance) flag("later-packet", sample.later);
      if (bounded_later && sample.later > 3.0 + kTolerance) flag("later-packet", sample.later);
      if (net.protocol == Protocol::disco && sample.first > 7.0 + kTolerance) flag("first-packet", sample.first);
    }
    report.samples.push_back(sample);
  }
  return report;
}

StretchReport measure_stretch(const Network& net, const std::vector<std::pair<NodeId, NodeId>>& pairs) {
  return measure_stretch(net, pairs, net.config.heuristic);
}

std::size_t useful_fact_violations(const RoutingTables& tables, const std::vector<std::pair<NodeId, NodeId>>& pairs) {
  const Topology& topo = tables.topology();
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pairs[a].first < pairs[b].first; });
  DijkstraWorkspace ws(topo.node_count());
  std::size_t violations = 0;
  for (std::size_t i = 0; i < order.size();) {
    const NodeId s = pairs[order[i]].first;
    ws.run(topo, s, kInfinity, [](NodeId, Distance) { return true; });
    for (; i < order.size() && pairs[order[i]].first == s; ++i) {
      const NodeId t = pairs[order[i]].second;
      if (tables.in_vicinity(s, t)) continue;
      const Distance to_landmark = tables.landmark_distance(t, tables.closest_landmark(t));
      if (to_landmark > 2.0 * ws.dist(t)) ++violations;
    }
  }
  return violations;
}

std::vector<NodeId> congestion_destinations(std::size_t n, std::uint64_t seed) {
  if (n < 2) throw Error(ErrorCode::invalid_argument, "congestion needs two nodes");
  Rng rng(derive_seed(seed, streams::congestion));
  std::vector<NodeId> out(n);
  for (NodeId s = 0; s < n; ++s) {
    // Uniform over the other n - 1 nodes.
    auto t = static_cast<NodeId>(rng.below(n - 1));
    out[s] = t >= s ? t + 1 : t;
  }
  return out;
}

namespace {

void count_path(const Topology& topo, const Path& p, CongestionMap& map) {
  for (std::size_t i = 0; i + 1 < p.size(); ++i) ++map.edge_counts[topo.edge_index(p[i], p[i + 1])];
  map.total_hops += p.empty() ? 0 : p.size() - 1;
}

}  // namespace

CongestionMap measure_congestion(const Network& net, std::uint64_t seed) {
  const Topology& topo = *net.topology;
  const auto dest = congestion_destinations(topo.node_count(), seed);
  CongestionMap map{std::vector<std::uint64_t>(topo.edge_count(), 0), 0};
  for (NodeId s = 0; s < topo.node_count(); ++s) count_path(topo, later_packet_route(net, s, dest[s]).hops, map);
  return map;
}

CongestionMap shortest_path_congestion(const Topology& topo, std::uint64_t seed) {
  const auto dest = congestion_destinations(topo.node_count(), seed);
  CongestionMap map{std::vector<std::uint64_t>(topo.edge_count(), 0), 0};
  for (NodeId s = 0; s < topo.node_count(); ++s) count_path(topo, shortest_path(topo, s, dest[s]).path, map);
  return map;
}

double congestion_quantile(const CongestionMap& map, double q) {
  if (map.edge_counts.empty()) throw Error(ErrorCode::invalid_argument, "no edges");
  std::vector<std::uint64_t> sorted = map.edge_counts;
  std::sort(sorted.begin(), sorted.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
  return static_cast<double>(sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1]);
}

std::vector<std::pair<double, double>> emit_cdf(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::invalid_argument, "cdf of an empty sample");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i + 1 < values.size() && values[i + 1] == values[i]) continue;
    out.emplace_back(values[i], static_cast<double>(i + 1) / n);
  }
  return out;
}

std::string format_double(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

void write_state_csv(std::ostream& out, const Topology& topo, const std::vector<StateBreakdown>& state) {
  out << "node,landmark_routes,vicinity_or_cluster,label_map_used,resolution_entries,group_addresses,overlay_links,"
         "vrr_entries,total,bytes_v4,bytes_v6\n";
  for (NodeId v = 0; v < state.size(); ++v) {
    const auto& s = state[v];
    out << topo.name(v) << ',' << s.landmark_routes << ',' << s.vicinity_or_cluster << ',' << s.label_map_used << ','
        << s.resolution_entries << ',' << s.group_addresses << ',' << s.overlay_links << ',' << s.vrr_entries << ','
        << s.total() << ',' << s.bytes_v4 << ',' << s.bytes_v6 << '\n';
  }
}

void write_stretch_csv(std::ostream& out, const Topology& topo, const StretchReport& report) {
  out << "s,t,first,later,heuristic,fallback\n";
  for (const auto& s : report.samples) {
    out << topo.name(s.s) << ',' << topo.name(s.t) << ',' << format_double(s.first) << ','
        << format_double(s.later) << ',' << to_string(s.heuristic) << ',' << (s.fallback ? 1 : 0) << '\n';
  }
}

void write_congestion_csv(std::ostream& out, const Topology& topo, const CongestionMap& map) {
  out << "u,v,count\n";
  const auto& edges = topo.edges();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    out << topo.name(edges[i].u) << ',' << topo.name(edges[i].v) << ',' << map.edge_counts[i] << '\n';
  }
}

void write_messages_csv(std::ostream& out, const Topology& topo, const MessageCounters& counters) {
  out << "node,class,count\n";
  for (NodeId v = 0; v < counters.per_node.size(); ++v) {
    for (std::size_t c = 0; c < MessageCounters::kClasses; ++c) {
      out << topo.name(v) << ',' << MessageCounters::kNames[c] << ',' << counters.per_node[v][c] << '\n';
    }
  }
}

void write_cdf_csv(std::ostream& out, const std::vector<std::pair<double, double>>& cdf) {
  out << "value,fraction\n";
  for (const auto& [x, f] : cdf) out << format_double(x) << ',' << format_double(f) << '\n';
}

}  // namespace disco
