#include "disco/des.hpp"

#include <limits>
#include <set>
#include <tuple>
#include <unordered_map>

namespace disco {

namespace {

constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

// Paths as shared cons cells (node, rest).
class PathArena {
 public:
  std::uint32_t cons(NodeId node, std::uint32_t rest) {
    cells_.push_back({node, rest});
    return static_cast<std::uint32_t>(cells_.size() - 1);
  }
  bool contains(std::uint32_t path, NodeId v) const {
    for (; path != kNone; path = cells_[path].rest) {
      if (cells_[path].node == v) return true;
    }
    return false;
  }
  void clear() { cells_.clear(); }

 private:
  struct Cell {
    NodeId node;
    std::uint32_t rest;
  };
  std::vector<Cell> cells_;
};

// Neighbor slots: reverse[off[v] + i] is v's slot in the adjacency of its i-th neighbor.
struct SlotIndex {
  std::vector<std::size_t> offset;
  std::vector<std::uint32_t> reverse;

  explicit SlotIndex(const Topology& topo) : offset(topo.node_count() + 1, 0) {
    for (NodeId v = 0; v < topo.node_count(); ++v) offset[v + 1] = offset[v] + topo.degree(v);
    reverse.resize(offset.back());
    for (NodeId v = 0; v < topo.node_count(); ++v) {
      const auto nbs = topo.neighbors(v);
      for (std::size_t i = 0; i < nbs.size(); ++i) reverse[offset[v] + i] = *topo.label_of(nbs[i].node, v);
    }
  }
};

class Budget {
 public:
  explicit Budget(std::uint64_t limit) : limit_(limit) {}
  void tick() {
    if (++used_ > limit_) {
      throw Error(ErrorCode::non_convergence, "no convergence within " + std::to_string(limit_) + " events");
    }
  }

 private:
  std::uint64_t limit_;
  std::uint64_t used_ = 0;
};

// Path-vector exchange where every node keeps its landmark routes plus the
// k nearest destinations it hears about; only those are re-announced.
// Updates arriving in one tick are applied together, then net changes go out.
class VicinityExchange {
 public:
  VicinityExchange(const Topology& topo, const LandmarkSet& landmarks, std::span<const double> estimates,
                   MessageCounters& counters, Budget& budget)
      : topo_(topo), landmarks_(landmarks), slots_(topo), counters_(counters), budget_(budget), nodes_(topo.node_count()) {
    for (NodeId v = 0; v < topo.node_count(); ++v) {
      nodes_[v].capacity = std::min(vicinity_size(estimates[v]), topo.node_count() - 1);
    }
  }

  void run() {
    for (NodeId v = 0; v < topo_.node_count(); ++v) {
      const std::uint32_t self = arena_.cons(v, kNone);
      broadcast(0, v, {kNoNode, 0, v, 0.0, self, false, landmarks_.contains(v)});
    }
    while (!queue_.empty()) {
      const Tick now = queue_.next_time();
      while (!queue_.empty() && queue_.next_time() == now) {
        budget_.tick();
        receive(queue_.pop().second);
      }
      flush(now);
    }
  }

  LandmarkRoutes landmark_routes() const {
    LandmarkRoutes r;
    for (NodeId l : landmarks_.members) {
      std::vector<Distance> dist(topo_.node_count(), kInfinity);
      std::vector<NodeId> next(topo_.node_count(), kNoNode);
      for (NodeId v = 0; v < topo_.node_count(); ++v) {
        if (v == l) {
          dist[v] = 0.0;
          continue;
        }
        const Node& node = nodes_[v];
        auto it = node.index.find(l);
        if (it == node.index.end()) continue;
        const Dest& d = node.dests[it->second];
        dist[v] = d.best_dist;
        next[v] = d.best_slot == kNone ? kNoNode : topo_.neighbors(v)[d.best_slot].node;
      }
      r.dist.push_back(std::move(dist));
      r.next_hop.push_back(std::move(next));
    }
    return r;
  }

  std::vector<std::vector<RouteEntry>> vicinities() const {
    std::vector<std::vector<RouteEntry>> out(topo_.node_count());
    for (NodeId v = 0; v < topo_.node_count(); ++v) {
      const Node& node = nodes_[v];
      for (const Key& k : node.inside) {
        const Dest& d = node.dests[node.index.at(std::get<2>(k))];
        out[v].push_back({d.node, topo_.neighbors(v)[d.best_slot].node, d.best_dist});
      }
      std::sort(out[v].begin(), out[v].end(), [](const RouteEntry& a, const RouteEntry& b) { return a.node < b.node; });
    }
    return out;
  }

 private:
  struct Msg {
    NodeId to;
    std::uint32_t slot;
    NodeId dest;
    Distance dist;
    std::uint32_t path;
    bool withdraw;
    bool landmark;
  };
  struct Offer {
    Distance dist = kInfinity;
    std::uint32_t path = kNone;
  };
  struct Dest {
    NodeId node = kNoNode;
    bool landmark = false;
    bool inside = false;
    std::uint32_t offers = 0;  // first offer in Node::offers
    std::uint32_t best_slot = kNone;
    Distance best_dist = kInfinity;
    std::uint32_t best_path = kNone;
    bool exported = false;
    bool dirty = false;
    std::uint32_t exported_slot = kNone;
    Distance exported_dist = kInfinity;
    std::uint32_t exported_path = kNone;
  };
  using Key = std::tuple<Distance, std::uint64_t, NodeId>;
  struct Node {
    std::size_t capacity = 0;
    std::unordered_map<NodeId, std::uint32_t> index;
    std::vector<Dest> dests;
    std::vector<Offer> offers;
    std::set<Key> inside;
    std::set<Key> outside;
    std::vector<NodeId> dirty;
  };

  void broadcast(Tick now, NodeId from, Msg msg) {
    const auto nbs = topo_.neighbors(from);
    for (std::size_t i = 0; i < nbs.size(); ++i) {
      msg.to = nbs[i].node;
      msg.slot = slots_.reverse[slots_.offset[from] + i];
      counters_.add(from, MessageCounters::route);
      queue_.push(now + 1, msg);
    }
  }

  Dest& dest_of(Node& node, NodeId v, NodeId dest) {
    auto [it, fresh] = node.index.emplace(dest, static_cast<std::uint32_t>(node.dests.size()));
    if (fresh) {
      Dest d;
      d.node = dest;
      d.offers = static_cast<std::uint32_t>(node.offers.size());
      node.dests.push_back(d);
      node.offers.resize(node.offers.size() + topo_.degree(v));
    }
    return node.dests[it->second];
  }

  Key key_of(const Dest& d) const { return {d.best_dist, tie_rank(topo_.hash(d.node)), d.node}; }

  void set_inside(Node& node, NodeId dest, bool inside, std::vector<NodeId>& moved) {
    Dest& d = node.dests[node.index.at(dest)];
    if (d.inside != inside) {
      d.inside = inside;
      moved.push_back(dest);
    }
  }

  void rebalance(Node& node, std::vector<NodeId>& moved) {
    while (node.inside.size() < node.capacity && !node.outside.empty()) {
      const Key k = *node.outside.begin();
      node.outside.erase(node.outside.begin());
      node.inside.insert(k);
      set_inside(node, std::get<2>(k), true, moved);
    }
    while (!node.inside.empty() && !node.outside.empty() && *node.outside.begin() < *node.inside.rbegin()) {
      const Key in = *node.outside.begin();
      const Key out = *node.inside.rbegin();
      node.outside.erase(node.outside.begin());
      node.inside.erase(std::prev(node.inside.end()));
      node.inside.insert(in);
      node.outside.insert(out);
      set_inside(node, std::get<2>(in), true, moved);
      set_inside(node, std::get<2>(out), false, moved);
    }
  }

  void mark(NodeId v, Dest& d) {
    Node& node = nodes_[v];
    if (d.dirty) return;
    d.dirty = true;
    if (node.dirty.empty()) dirty_nodes_.push_back(v);
    node.dirty.push_back(d.node);
  }

  // Announces the net effect of everything a node received this tick.
  void flush(Tick now) {
    for (NodeId v : dirty_nodes_) {
      Node& node = nodes_[v];
      for (NodeId dest : node.dirty) {
        Dest& d = node.dests[node.index.at(dest)];
        d.dirty = false;
        announce(now, v, d);
      }
      node.dirty.clear();
    }
    dirty_nodes_.clear();
  }

  void receive(const Msg& msg) {
    const NodeId v = msg.to;
    if (msg.dest == v) return;
    Node& node = nodes_[v];
    Dest& d = dest_of(node, v, msg.dest);
    const std::uint32_t di = node.index.at(msg.dest);
    d.landmark |= msg.landmark;
    Offer& offer = node.offers[d.offers + msg.slot];
    if (msg.withdraw || arena_.contains(msg.path, v)) {
      offer = {};
    } else {
      offer = {msg.dist + topo_.neighbors(v)[msg.slot].weight, msg.path};
    }

    const bool had = d.best_slot != kNone;
    const Key old_key = key_of(d);
    const auto nbs = topo_.neighbors(v);
    d.best_slot = kNone;
    d.best_dist = kInfinity;
    d.best_path = kNone;
    for (std::uint32_t i = 0; i < nbs.size(); ++i) {
      const Offer& o = node.offers[d.offers + i];
      if (o.path == kNone) continue;
      if (o.dist < d.best_dist ||
          (o.dist == d.best_dist && topo_.name_rank(nbs[i].node) < topo_.name_rank(nbs[d.best_slot].node))) {
        d.best_slot = i;
        d.best_dist = o.dist;
        d.best_path = o.path;
      }
    }
    const bool has = d.best_slot != kNone;

    std::vector<NodeId> moved;
    if (had != has || old_key != key_of(d)) {
      if (had) {
        if (d.inside) {
          node.inside.erase(old_key);
        } else {
          node.outside.erase(old_key);
        }
      }
      if (d.inside) {
        d.inside = false;
        moved.push_back(d.node);
      }
      if (has) node.outside.insert(key_of(node.dests[di]));
      rebalance(node, moved);
    }
    mark(v, node.dests[di]);
    for (NodeId m : moved) mark(v, node.dests[node.index.at(m)]);
  }

  void announce(Tick now, NodeId v, Dest& d) {
    const bool should = d.best_slot != kNone && (d.landmark || d.inside);
    if (should) {
      if (d.exported && d.exported_slot == d.best_slot && d.exported_dist == d.best_dist &&
          d.exported_path == d.best_path) {
        return;
      }
      d.exported = true;
      d.exported_slot = d.best_slot;
      d.exported_dist = d.best_dist;
      d.exported_path = d.best_path;
      broadcast(now, v, {kNoNode, 0, d.node, d.best_dist, arena_.cons(v, d.best_path), false, d.landmark});
    } else if (d.exported) {
      d.exported = false;
      broadcast(now, v, {kNoNode, 0, d.node, kInfinity, kNone, true, d.landmark});
    }
  }

  const Topology& topo_;
  const LandmarkSet& landmarks_;
  SlotIndex slots_;
  MessageCounters& counters_;
  Budget& budget_;
  std::vector<Node> nodes_;
  std::vector<NodeId> dirty_nodes_;
  PathArena arena_;
  EventQueue<Msg> queue_;
};

// Single-destination path-vector exchange where routes only ever improve.
// Routes of length >= radius are neither accepted nor sent.
class OriginExchange {
 public:
  OriginExchange(const Topology& topo, MessageCounters& counters, Budget& budget)
      : topo_(topo),
        counters_(counters),
        budget_(budget),
        dist_(topo.node_count(), kInfinity),
        next_(topo.node_count(), kNoNode),
        via_(topo.node_count(), kNone),
        path_(topo.node_count(), kNone),
        changed_flag_(topo.node_count(), 0) {}

  void run(NodeId origin, Distance radius) {
    for (NodeId v : touched_) {
      dist_[v] = kInfinity;
      next_[v] = kNoNode;
      via_[v] = kNone;
      path_[v] = kNone;
    }
    touched_.clear();
    arena_.clear();
    radius_ = radius;
    dist_[origin] = 0.0;
    path_[origin] = arena_.cons(origin, kNone);
    touched_.push_back(origin);
    send(0, origin);
    while (!queue_.empty()) {
      const Tick now = queue_.next_time();
      while (!queue_.empty() && queue_.next_time() == now) {
        budget_.tick();
        receive(queue_.pop().second);
      }
      for (NodeId v : changed_) {
        changed_flag_[v] = 0;
        send(now, v);
      }
      changed_.clear();
    }
  }

  Distance dist(NodeId v) const { return dist_[v]; }
  NodeId next_hop(NodeId v) const { return next_[v]; }
  // Origin first, then every node that accepted a route.
  const std::vector<NodeId>& reached() const { return touched_; }

 private:
  struct Msg {
    NodeId to;
    NodeId from;
    Distance dist;
    std::uint32_t path;
  };

  void send(Tick now, NodeId v) {
    for (const Neighbor& nb : topo_.neighbors(v)) {
      if (!(dist_[v] + nb.weight < radius_)) continue;
      counters_.add(v, MessageCounters::route);
      queue_.push(now + 1, {nb.node, v, dist_[v], path_[v]});
    }
  }

  void receive(const Msg& msg) {
    const NodeId v = msg.to;
    if (arena_.contains(msg.path, v)) return;
    const Distance nd = msg.dist + topo_.edge_weight(msg.from, v);
    if (!(nd < radius_)) return;
    if (next_[v] == msg.from) {
      if (nd == dist_[v] && via_[v] == msg.path) return;
    } else if (next_[v] != kNoNode) {
      if (!(nd < dist_[v] || (nd == dist_[v] && topo_.name_rank(msg.from) < topo_.name_rank(next_[v])))) return;
    } else {
      touched_.push_back(v);
    }
    dist_[v] = nd;
    next_[v] = msg.from;
    via_[v] = msg.path;
    path_[v] = arena_.cons(v, msg.path);
    if (!changed_flag_[v]) {
      changed_flag_[v] = 1;
      changed_.push_back(v);
    }
  }

  const Topology& topo_;
  MessageCounters& counters_;
  Budget& budget_;
  std::vector<Distance> dist_;
  std::vector<NodeId> next_;
  std::vector<std::uint32_t> via_;
  std::vector<std::uint32_t> path_;
  std::vector<NodeId> touched_;
  std::vector<char> changed_flag_;
  std::vector<NodeId> changed_;
  Distance radius_ = kInfinity;
  PathArena arena_;
  EventQueue<Msg> queue_;
};

// Every node sends its address to the owner of its name hash; one message per hop.
template <class Knowledge>
void resolution_inserts(const Knowledge& kb, const std::vector<Address>& addresses, ResolutionDb& db,
                        MessageCounters& counters) {
  const Topology& topo = kb.topology();
  for (NodeId v = 0; v < topo.node_count(); ++v) {
    const NodeId owner = db.owner_of(topo.hash(v));
    const Path p = kb.known_path(v, owner);
    for (std::size_t i = 0; i + 1 < p.size(); ++i) counters.add(p[i], MessageCounters::resolution);
    db.insert(v, addresses[v], 0.0);
  }
}

// Ring and finger discovery: one lookup per link through the resolution owner
// of the sought key, answered along the reverse path.
void overlay_lookups(const RoutingTables& tables, const ResolutionDb& db, const Overlay& overlay,
                     MessageCounters& counters) {
  const Topology& topo = tables.topology();
  auto lookup = [&](NodeId v, NameHash key) {
    const Path p = tables.known_path(v, db.owner_of(key));
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
      counters.add(p[i], MessageCounters::overlay);
      counters.add(p[i + 1], MessageCounters::overlay);
    }
  };
  for (NodeId v = 0; v < topo.node_count(); ++v) {
    lookup(v, topo.hash(v));
    for (std::uint64_t key : overlay.links[v].finger_keys) lookup(v, NameHash{key});
  }
}

Dissemination disseminate_des(const Topology& topo, const Overlay& overlay, std::span<const unsigned> ks,
                              MessageCounters& counters, Budget& budget) {
  const std::size_t n = topo.node_count();
  Dissemination out;
  out.tables.resize(n);
  out.sent.assign(n, 0);
  struct Msg {
    NodeId to;
    NodeId from;
    NodeId origin;
    Direction direction;
    std::uint32_t hops;
  };
  EventQueue<Msg> queue;
  auto send = [&](Tick now, NodeId from, NodeId to, NodeId origin, Direction dir, std::uint32_t hops) {
    ++out.messages;
    ++out.sent[from];
    counters.add(from, MessageCounters::dissemination);
    queue.push(now + 1, {to, from, origin, dir, hops});
  };
  for (NodeId x = 0; x < n; ++x) {
    for (NodeId w : overlay.neighbors[x]) {
      if (!forwards_to(topo, ks, x, w, x, Direction::up, true)) continue;
      send(0, x, w, x, topo.hash(w) > topo.hash(x) ? Direction::up : Direction::down, 1);
    }
  }
  while (!queue.empty()) {
    budget.tick();
    auto [now, msg] = queue.pop();
    const NodeId w = msg.to;
    if (!accepts_announcement(topo, ks, w, msg.from, msg.origin)) continue;
    if (AddressEntry* e = out.tables[w].find_mutable(msg.origin)) {
      if (closer_sender(topo, msg.origin, msg.from, e->learned_from)) e->learned_from = msg.from;
      continue;
    }
    out.tables[w].announce({msg.origin, msg.from, msg.direction, msg.hops}, static_cast<double>(now) * kSecondsPerTick);
    for (NodeId y : overlay.neighbors[w]) {
      if (forwards_to(topo, ks, w, y, msg.origin, msg.direction, false)) {
        send(now, w, y, msg.origin, msg.direction, msg.hops + 1);
      }
    }
  }
  return out;
}

}  // namespace

Network run_des(const Topology& topo, Protocol protocol, const ProtocolConfig& config, std::uint64_t seed) {
  const std::size_t n = topo.node_count();
  if (n > config.des_cap) {
    throw Error(ErrorCode::infeasible, "discrete-event runs are capped at " + std::to_string(config.des_cap) + " nodes");
  }
  if (protocol == Protocol::vrr) throw Error(ErrorCode::invalid_argument, "vrr has no discrete-event model");
  Network net;
  net.protocol = protocol;
  net.topology = &topo;
  net.seed = seed;
  net.config = config;
  MessageCounters counters(n);
  Budget budget(config.event_budget);

  if (protocol == Protocol::path_vector) {
    auto st = std::make_unique<PathVectorState>();
    st->nodes = n;
    st->has_tables = n <= config.pathvector_table_cap;
    OriginExchange ex(topo, counters, budget);
    for (NodeId t = 0; t < n; ++t) {
      ex.run(t, kInfinity);
      if (!st->has_tables) continue;
      std::vector<Distance> dist(n);
      std::vector<NodeId> next(n);
      for (NodeId v = 0; v < n; ++v) {
        dist[v] = ex.dist(v);
        next[v] = ex.next_hop(v);
      }
      st->dist.push_back(std::move(dist));
      st->next_hop.push_back(std::move(next));
    }
    net.path_vector = std::move(st);
    net.messages = std::move(counters);
    return net;
  }

  net.estimates = estimate_n(topo, config.error_model, seed);
  net.landmarks = elect_landmarks(topo, net.estimates, seed);

  if (protocol == Protocol::s4) {
    OriginExchange ex(topo, counters, budget);
    LandmarkRoutes routes;
    for (NodeId l : net.landmarks.members) {
      ex.run(l, kInfinity);
      std::vector<Distance> dist(n);
      std::vector<NodeId> next(n);
      for (NodeId v = 0; v < n; ++v) {
        dist[v] = ex.dist(v);
        next[v] = ex.next_hop(v);
      }
      routes.dist.push_back(std::move(dist));
      routes.next_hop.push_back(std::move(next));
    }
    std::vector<std::vector<RouteEntry>> clusters(n);
    for (NodeId w = 0; w < n; ++w) {
      Distance radius = kInfinity;
      for (const auto& d : routes.dist) radius = std::min(radius, d[w]);
      ex.run(w, radius);
      for (NodeId v : ex.reached()) {
        if (v != w) clusters[v].push_back({w, ex.next_hop(v), ex.dist(v)});
      }
    }
    net.s4 = std::make_unique<S4State>(topo, net.landmarks, std::move(routes), std::move(clusters));
    net.resolution = std::make_unique<ResolutionDb>(topo, net.landmarks, config.virtual_points);
    resolution_inserts(*net.s4, net.s4->addresses(), *net.resolution, counters);
    net.messages = std::move(counters);
    return net;
  }

  VicinityExchange ex(topo, net.landmarks, net.estimates, counters, budget);
  ex.run();
  net.tables = std::make_unique<RoutingTables>(topo, net.landmarks, net.estimates, ex.landmark_routes(), ex.vicinities());
  std::vector<Address> addresses(n);
  for (NodeId v = 0; v < n; ++v) addresses[v] = net.tables->address(v);
  net.resolution = std::make_unique<ResolutionDb>(topo, net.landmarks, config.virtual_points);
  resolution_inserts(*net.tables, addresses, *net.resolution, counters);

  if (protocol == Protocol::disco) {
    auto groups = std::make_unique<GroupState>();
    groups->k = group_ks(net.estimates);
    groups->overlay = build_overlay(topo, groups->k, config.fingers, seed);
    overlay_lookups(*net.tables, *net.resolution, groups->overlay, counters);
    groups->dissemination = disseminate_des(topo, groups->overlay, groups->k, counters, budget);
    net.announcement_hops = announcement_hop_stats(groups->dissemination);
    net.groups = std::move(groups);
  }
  net.messages = std::move(counters);
  return net;
}

}  // namespace disco
