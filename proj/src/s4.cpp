#include <algorithm>

#include "disco/baselines.hpp"

namespace disco {

std::vector<std::vector<RouteEntry>> compute_clusters(const Topology& topo, const LandmarkSet& /*landmarks*/,
                                                      const LandmarkRoutes& routes) {
  const std::size_t n = topo.node_count();
  std::vector<std::vector<RouteEntry>> clusters(n);
  DijkstraWorkspace ws(n);
  for (NodeId w = 0; w < n; ++w) {
    Distance radius = kInfinity;
    for (const auto& d : routes.dist) radius = std::min(radius, d[w]);
    ws.run(topo, w, radius, [&](NodeId v, Distance d) {
      if (v != w) clusters[v].push_back({w, ws.parent(v), d});
      return true;
    });
  }
  // Entries were appended in increasing w, so each list is already sorted.
  return clusters;
}

S4State::S4State(const Topology& topo, LandmarkSet landmarks, LandmarkRoutes routes,
                 std::vector<std::vector<RouteEntry>> clusters)
    : topo_(&topo), landmarks_(std::move(landmarks)), routes_(std::move(routes)), clusters_(std::move(clusters)) {
  addresses_ = closest_landmark_addresses(topo, landmarks_, routes_);
}

const RouteEntry* S4State::find_cluster(NodeId v, NodeId w) const {
  const auto& e = clusters_[v];
  auto it = std::lower_bound(e.begin(), e.end(), w, [](const RouteEntry& x, NodeId y) { return x.node < y; });
  return it != e.end() && it->node == w ? &*it : nullptr;
}

Distance S4State::radius(NodeId w) const {
  return routes_.dist[static_cast<std::size_t>(landmarks_.slot[addresses_[w].landmark])][w];
}

std::optional<Distance> S4State::known_distance(NodeId x, NodeId y) const {
  if (x == y) return 0.0;
  if (landmarks_.contains(y)) return routes_.dist[static_cast<std::size_t>(landmarks_.slot[y])][x];
  if (const RouteEntry* e = find_cluster(x, y)) return e->distance;
  return std::nullopt;
}

Path S4State::known_path(NodeId x, NodeId y) const {
  Path p{x};
  if (landmarks_.contains(y)) {
    const auto& next = routes_.next_hop[static_cast<std::size_t>(landmarks_.slot[y])];
    for (NodeId cur = x; cur != y;) p.push_back(cur = next[cur]);
    return p;
  }
  for (NodeId cur = x; cur != y;) {
    const RouteEntry* e = find_cluster(cur, y);
    if (e == nullptr) throw Error(ErrorCode::invariant_violation, "cluster route broken");
    p.push_back(cur = e->next_hop);
  }
  return p;
}

S4State s4_converge(const Topology& topo, const LandmarkSet& landmarks) {
  if (landmarks.members.empty()) throw Error(ErrorCode::invalid_argument, "landmark set is empty");
  LandmarkRoutes routes = landmark_routes(topo, landmarks);
  auto clusters = compute_clusters(topo, landmarks, routes);
  return S4State(topo, landmarks, std::move(routes), std::move(clusters));
}

ResolutionDb build_resolution_db(const S4State& state, unsigned virtual_points, double now) {
  ResolutionDb db(state.topology(), state.landmarks(), virtual_points);
  for (NodeId v = 0; v < state.topology().node_count(); ++v) db.insert(v, state.address(v), now);
  return db;
}

namespace {

Path s4_base_route(const S4State& st, NodeId s, const Address& t_address) {
  const Path tail = decode_explicit_route(st.topology(), t_address.landmark, t_address.route.labels);
  const NodeId t = tail.back();
  if (st.known_distance(s, t)) return st.known_path(s, t);
  Path p = st.known_path(s, t_address.landmark);
  p.insert(p.end(), tail.begin() + 1, tail.end());
  return p;
}

RouteResult s4_route_to(const S4State& st, NodeId s, const Address& t_address, Heuristic h, RouteResult::Phase phase) {
  Path forward = s4_base_route(st, s, t_address);
  const NodeId t = forward.back();
  if (st.known_distance(s, t) || h == Heuristic::none) return make_route(st.topology(), std::move(forward), phase, h);
  const Path reverse = s4_base_route(st, t, st.address(s));
  return make_route(st.topology(), apply_shortcut(forward, reverse, st, h), phase, h);
}

}  // namespace

RouteResult s4_route(const S4State& state, NodeId s, NodeId t, Heuristic h) {
  return s4_route_to(state, s, state.address(t), h, RouteResult::Phase::later_packet);
}

RouteResult s4_first_packet(const S4State& state, const ResolutionDb& db, NodeId s, NodeId t, Heuristic h) {
  const Topology& topo = state.topology();
  const LookupResult found = db.lookup(topo.name(t), 0.0);
  Path hops = state.known_path(s, found.owner);
  if (found.status != LookupStatus::found) {
    RouteResult r = make_route(topo, std::move(hops), RouteResult::Phase::first_packet, h);
    r.fallback = true;
    r.delivered = false;
    return r;
  }
  const RouteResult rest = s4_route_to(state, found.owner, found.entry->address, h, RouteResult::Phase::first_packet);
  hops.insert(hops.end(), rest.hops.begin() + 1, rest.hops.end());
  return make_route(topo, std::move(hops), RouteResult::Phase::first_packet, h);
}

}  // namespace disco
