#include "disco/nddisco.hpp"

#include <algorithm>
#include <bit>

namespace disco {

std::size_t vicinity_size(double n_est) {
  n_est = std::max(n_est, 2.0);
  const double k = std::ceil(std::sqrt(n_est * std::log2(n_est)));
  const double cap = std::max(1.0, std::floor(n_est - 1.0));
  return static_cast<std::size_t>(std::min(k, cap));
}

ExplicitRoute encode_explicit_route(const Topology& topo, std::span<const NodeId> path) {
  ExplicitRoute r;
  if (path.empty()) throw Error(ErrorCode::invalid_walk, "empty path");
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const auto label = topo.label_of(path[i], path[i + 1]);
    if (!label) throw Error(ErrorCode::invalid_walk, "path is not a walk in the topology");
    r.labels.push_back(*label);
    r.bit_size += static_cast<std::size_t>(std::bit_width(topo.degree(path[i]) - 1));
  }
  return r;
}

Path decode_explicit_route(const Topology& topo, NodeId start, std::span<const std::uint32_t> labels) {
  if (start >= topo.node_count()) throw Error(ErrorCode::undecodable_address, "unknown landmark");
  Path p{start};
  for (std::uint32_t label : labels) {
    const auto nbs = topo.neighbors(p.back());
    if (label >= nbs.size()) throw Error(ErrorCode::undecodable_address, "label out of range");
    p.push_back(nbs[label].node);
  }
  return p;
}

LandmarkRoutes landmark_routes(const Topology& topo, const LandmarkSet& landmarks) {
  LandmarkRoutes r;
  for (NodeId l : landmarks.members) {
    ShortestPathTree t = shortest_path_tree(topo, l);
    r.dist.push_back(std::move(t.dist));
    r.next_hop.push_back(std::move(t.parent));
  }
  return r;
}

std::vector<Address> closest_landmark_addresses(const Topology& topo, const LandmarkSet& landmarks,
                                                const LandmarkRoutes& routes) {
  const std::size_t n = topo.node_count();
  std::vector<Address> out(n);
  Path path;
  for (NodeId v = 0; v < n; ++v) {
    std::size_t best = 0;
    for (std::size_t s = 1; s < landmarks.size(); ++s) {
      const Distance a = routes.dist[s][v];
      const Distance b = routes.dist[best][v];
      if (a < b || (a == b && topo.hash(landmarks.members[s]) < topo.hash(landmarks.members[best]))) best = s;
    }
    const NodeId l = landmarks.members[best];
    path.clear();
    for (NodeId x = v; x != l; x = routes.next_hop[best][x]) path.push_back(x);
    path.push_back(l);
    std::reverse(path.begin(), path.end());
    out[v].landmark = l;
    out[v].route = encode_explicit_route(topo, path);
  }
  return out;
}

Address make_address(const RoutingTables& tables, NodeId v) { return tables.address(v); }

std::vector<std::vector<RouteEntry>> compute_vicinities(const Topology& topo, std::span<const double> estimates) {
  const std::size_t n = topo.node_count();
  std::vector<std::vector<RouteEntry>> vic(n);
  DijkstraWorkspace ws(n);
  for (NodeId v = 0; v < n; ++v) {
    const std::size_t k = std::min(vicinity_size(estimates[v]), n - 1);
    auto& out = vic[v];
    out.reserve(k);
    ws.run(topo, v, kInfinity, [&](NodeId u, Distance d) {
      if (u == v) return k > 0;
      out.push_back({u, ws.first_hop(u), d});
      return out.size() < k;
    });
    std::sort(out.begin(), out.end(), [](const RouteEntry& a, const RouteEntry& b) { return a.node < b.node; });
  }
  auto lookup = [&](NodeId u, NodeId w) -> const RouteEntry* {
    const auto& e = vic[u];
    auto it = std::lower_bound(e.begin(), e.end(), w, [](const RouteEntry& x, NodeId y) { return x.node < y; });
    return it != e.end() && it->node == w ? &*it : nullptr;
  };
  // Prefer the smallest-named neighbor that itself holds a shortest route to
  // the destination; that is what a path-vector exchange settles on.
  for (NodeId v = 0; v < n; ++v) {
    for (RouteEntry& entry : vic[v]) {
      NodeId best = kNoNode;
      for (const Neighbor& nb : topo.neighbors(v)) {
        bool ok = false;
        if (nb.node == entry.node) {
          ok = nb.weight == entry.distance;
        } else if (const RouteEntry* via = lookup(nb.node, entry.node)) {
          ok = nb.weight + via->distance == entry.distance;
        }
        if (ok && (best == kNoNode || topo.name_rank(nb.node) < topo.name_rank(best))) best = nb.node;
      }
      if (best != kNoNode) entry.next_hop = best;
    }
  }
  return vic;
}

RoutingTables::RoutingTables(const Topology& topo, LandmarkSet landmarks, std::vector<double> estimates,
                             LandmarkRoutes routes, std::vector<std::vector<RouteEntry>> vicinity)
    : topo_(&topo),
      landmarks_(std::move(landmarks)),
      estimates_(std::move(estimates)),
      routes_(std::move(routes)) {
  const std::size_t n = topo.node_count();
  vicinity_offsets_.assign(n + 1, 0);
  for (NodeId v = 0; v < n; ++v) vicinity_offsets_[v + 1] = vicinity_offsets_[v] + vicinity[v].size();
  vicinity_.reserve(vicinity_offsets_[n]);
  for (auto& entries : vicinity) {
    vicinity_.insert(vicinity_.end(), entries.begin(), entries.end());
    std::vector<RouteEntry>().swap(entries);
  }

  addresses_ = closest_landmark_addresses(topo, landmarks_, routes_);
  std::vector<std::vector<std::uint32_t>> used(n);
  for (NodeId v = 0; v < n; ++v) {
    const Address& a = addresses_[v];
    NodeId x = a.landmark;
    for (std::uint32_t label : a.route.labels) {
      used[x].push_back(label);
      x = topo.neighbors(x)[label].node;
    }
  }
  label_offsets_.assign(n + 1, 0);
  for (NodeId v = 0; v < n; ++v) {
    auto& u = used[v];
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());
    label_offsets_[v + 1] = label_offsets_[v] + u.size();
    used_labels_.insert(used_labels_.end(), u.begin(), u.end());
  }
}

const RouteEntry* RoutingTables::find_vicinity(NodeId v, NodeId w) const {
  const auto e = vicinity(v);
  auto it = std::lower_bound(e.begin(), e.end(), w, [](const RouteEntry& x, NodeId y) { return x.node < y; });
  return it != e.end() && it->node == w ? &*it : nullptr;
}

Distance RoutingTables::landmark_distance(NodeId v, NodeId landmark) const {
  return routes_.dist[static_cast<std::size_t>(landmarks_.slot[landmark])][v];
}

NodeId RoutingTables::landmark_next_hop(NodeId v, NodeId landmark) const {
  return routes_.next_hop[static_cast<std::size_t>(landmarks_.slot[landmark])][v];
}

std::optional<Distance> RoutingTables::known_distance(NodeId x, NodeId y) const {
  if (x == y) return 0.0;
  if (landmarks_.contains(y)) return landmark_distance(x, y);
  if (const RouteEntry* e = find_vicinity(x, y)) return e->distance;
  return std::nullopt;
}

Path RoutingTables::known_path(NodeId x, NodeId y) const {
  Path p{x};
  if (landmarks_.contains(y)) {
    const auto& next = routes_.next_hop[static_cast<std::size_t>(landmarks_.slot[y])];
    for (NodeId cur = x; cur != y;) p.push_back(cur = next[cur]);
    return p;
  }
  for (NodeId cur = x; cur != y;) {
    const RouteEntry* e = find_vicinity(cur, y);
    if (e == nullptr || p.size() > topo_->node_count()) {
      // Only reachable when vicinity sizes differ between nodes.
      const Path rest = shortest_path(*topo_, cur, y).path;
      p.insert(p.end(), rest.begin() + 1, rest.end());
      break;
    }
    p.push_back(cur = e->next_hop);
  }
  return p;
}

std::size_t RoutingTables::control_plane_entries(NodeId v, ControlPlaneMode mode) const {
  auto exported = [&](NodeId u) {
    std::size_t both = 0;
    for (const RouteEntry& e : vicinity(u)) both += landmarks_.contains(e.node);
    return landmarks_.size() + vicinity(u).size() - both;
  };
  if (mode == ControlPlaneMode::forgetful) return exported(v);
  std::size_t total = 0;
  for (const Neighbor& nb : topo_->neighbors(v)) total += exported(nb.node) + (landmarks_.contains(nb.node) ? 0 : 1);
  return total;
}

RoutingTables converge(const Topology& topo, const LandmarkSet& landmarks, std::span<const double> estimates) {
  if (landmarks.members.empty()) throw Error(ErrorCode::invalid_argument, "landmark set is empty");
  if (estimates.size() != topo.node_count()) throw Error(ErrorCode::invalid_argument, "one estimate per node required");
  return RoutingTables(topo, landmarks, std::vector<double>(estimates.begin(), estimates.end()),
                       landmark_routes(topo, landmarks), compute_vicinities(topo, estimates));
}

RouteResult make_route(const Topology& topo, Path hops, RouteResult::Phase phase, Heuristic h) {
  RouteResult r;
  r.length = topo.path_length(hops);
  r.hops = std::move(hops);
  r.phase = phase;
  r.heuristic = h;
  return r;
}

Path nd_base_route(const RoutingTables& tables, NodeId s, const Address& t_address) {
  const Path tail = decode_explicit_route(tables.topology(), t_address.landmark, t_address.route.labels);
  const NodeId t = tail.back();
  if (tables.known_distance(s, t)) return tables.known_path(s, t);
  Path p = tables.known_path(s, t_address.landmark);
  p.insert(p.end(), tail.begin() + 1, tail.end());
  return p;
}

RouteResult route_first_packet_nd(const RoutingTables& tables, NodeId s, const Address& t_address, Heuristic h) {
  const Topology& topo = tables.topology();
  Path forward = nd_base_route(tables, s, t_address);
  const NodeId t = forward.back();
  if (tables.known_distance(s, t) || h == Heuristic::none) {
    return make_route(topo, std::move(forward), RouteResult::Phase::first_packet, h);
  }
  const Path reverse = nd_base_route(tables, t, tables.address(s));
  return make_route(topo, apply_shortcut(forward, reverse, tables, h), RouteResult::Phase::first_packet, h);
}

std::optional<Path> handshake(const RoutingTables& tables, NodeId s, NodeId t) {
  if (!tables.in_vicinity(t, s)) return std::nullopt;
  Path p = tables.known_path(t, s);
  std::reverse(p.begin(), p.end());
  return p;
}

RouteResult route_later_packet_nd(const RoutingTables& tables, NodeId s, NodeId t, Heuristic h) {
  const Topology& topo = tables.topology();
  if (tables.known_distance(s, t)) {
    return make_route(topo, tables.known_path(s, t), RouteResult::Phase::later_packet, h);
  }
  if (auto p = handshake(tables, s, t)) return make_route(topo, std::move(*p), RouteResult::Phase::later_packet, h);
  RouteResult r = route_first_packet_nd(tables, s, tables.address(t), h);
  r.phase = RouteResult::Phase::later_packet;
  return r;
}

}  // namespace disco
