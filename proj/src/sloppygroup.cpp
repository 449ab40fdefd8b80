#include "disco/sloppygroup.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "disco/rng.hpp"

namespace disco {

unsigned group_k(double n_est) {
  if (!(n_est > 2.0)) return 0;
  const double k = std::floor(std::log2(std::sqrt(n_est / std::log2(n_est))));
  return k > 0.0 ? static_cast<unsigned>(k) : 0u;
}

GroupTracker::GroupTracker(double n_est, double hysteresis)
    : anchor_(n_est), hysteresis_(hysteresis), k_(group_k(n_est)) {}

unsigned GroupTracker::update(double n_est) {
  if (std::abs(n_est / anchor_ - 1.0) >= hysteresis_) {
    anchor_ = n_est;
    k_ = group_k(n_est);
  }
  return k_;
}

std::vector<unsigned> group_ks(std::span<const double> estimates) {
  std::vector<unsigned> ks(estimates.size());
  std::transform(estimates.begin(), estimates.end(), ks.begin(), group_k);
  return ks;
}

HashInterval group_interval(NameHash h, unsigned k) {
  if (k == 0) return {0, ~std::uint64_t{0}};
  const std::uint64_t span = k >= 64 ? 0 : (~std::uint64_t{0} >> k);
  const std::uint64_t lo = h.value & ~span;
  return {lo, lo | span};
}

std::vector<NodeId> core_group(const Topology& topo, std::span<const unsigned> ks, NodeId v) {
  const unsigned kmax = ks.empty() ? 0 : *std::max_element(ks.begin(), ks.end());
  std::vector<NodeId> out;
  for (NodeId x = 0; x < topo.node_count(); ++x) {
    if (x != v && same_prefix(topo.hash(x), topo.hash(v), kmax)) out.push_back(x);
  }
  return out;
}

HashIndex::HashIndex(const Topology& topo) : topo_(&topo), order_(topo.node_count()), position_(topo.node_count()) {
  for (NodeId v = 0; v < order_.size(); ++v) order_[v] = v;
  std::sort(order_.begin(), order_.end(), [&](NodeId a, NodeId b) { return topo.hash(a) < topo.hash(b); });
  hashes_.resize(order_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) {
    hashes_[i] = topo.hash(order_[i]).value;
    position_[order_[i]] = i;
  }
}

NodeId HashIndex::closest(std::uint64_t target, HashInterval range, NodeId exclude) const {
  const std::size_t n = order_.size();
  std::size_t right = static_cast<std::size_t>(std::lower_bound(hashes_.begin(), hashes_.end(), target) - hashes_.begin());
  if (right < n && order_[right] == exclude) ++right;
  std::ptrdiff_t left = static_cast<std::ptrdiff_t>(std::lower_bound(hashes_.begin(), hashes_.end(), target) - hashes_.begin()) - 1;
  if (left >= 0 && order_[static_cast<std::size_t>(left)] == exclude) --left;
  auto in_range = [&](std::uint64_t h) { return h >= range.lo && h <= range.hi; };
  NodeId best = kNoNode;
  std::uint64_t best_gap = 0;
  std::uint64_t best_hash = 0;
  auto consider = [&](std::size_t i) {
    const std::uint64_t h = hashes_[i];
    if (!in_range(h)) return;
    const std::uint64_t gap = h > target ? h - target : target - h;
    if (best == kNoNode || gap < best_gap || (gap == best_gap && h < best_hash)) {
      best = order_[i];
      best_gap = gap;
      best_hash = h;
    }
  };
  if (left >= 0) consider(static_cast<std::size_t>(left));
  if (right < n) consider(right);
  return best;
}

Overlay build_overlay(const Topology& topo, std::span<const unsigned> ks, unsigned fingers, std::uint64_t seed) {
  const std::size_t n = topo.node_count();
  const HashIndex index(topo);
  const auto& ring = index.ring();
  Overlay ov;
  ov.links.resize(n);
  const std::uint64_t s = derive_seed(seed, streams::overlay);
  for (NodeId v = 0; v < n; ++v) {
    OverlayLinks& l = ov.links[v];
    const std::size_t p = index.position(v);
    l.successor = ring[(p + 1) % n];
    l.predecessor = ring[(p + n - 1) % n];
    const NameHash h = topo.hash(v);
    const HashInterval iv = group_interval(h, ks[v]);
    const double up_len = static_cast<double>(iv.hi - h.value);
    const double down_len = static_cast<double>(h.value - iv.lo);
    const double wu = up_len > 1.0 ? std::log(up_len) : 0.0;
    const double wd = down_len > 1.0 ? std::log(down_len) : 0.0;
    if (wu + wd <= 0.0) continue;
    Rng rng(splitmix64(s ^ h.value));
    for (unsigned f = 0; f < fingers; ++f) {
      NodeId pick = kNoNode;
      std::uint64_t key = 0;
      for (int attempt = 0; attempt <= 16; ++attempt) {
        const bool up = rng.uniform01() * (wu + wd) < wu;
        const double len = up ? up_len : down_len;
        const double u = rng.uniform01();
        double d = std::floor(std::exp(u * std::log(len)));
        d = std::clamp(d, 1.0, len);
        const auto delta = static_cast<std::uint64_t>(std::min(d, 0x1.fffffffffffffp63));
        key = up ? h.value + std::min(delta, iv.hi - h.value) : h.value - std::min(delta, h.value - iv.lo);
        pick = index.closest(key, iv, v);
        if (pick == kNoNode) break;
        const bool dup = pick == l.successor || pick == l.predecessor ||
                         std::find(l.fingers.begin(), l.fingers.end(), pick) != l.fingers.end();
        if (!dup) break;
      }
      if (pick == kNoNode) break;
      l.fingers.push_back(pick);
      l.finger_keys.push_back(key);
    }
  }
  ov.neighbors.resize(n);
  auto link = [&](NodeId a, NodeId b) {
    if (a == b) return;
    ov.neighbors[a].push_back(b);
    ov.neighbors[b].push_back(a);
  };
  for (NodeId v = 0; v < n; ++v) {
    link(v, ov.links[v].successor);
    link(v, ov.links[v].predecessor);
    for (NodeId f : ov.links[v].fingers) link(v, f);
  }
  for (auto& nb : ov.neighbors) {
    std::sort(nb.begin(), nb.end(), [&](NodeId a, NodeId b) { return topo.hash(a) < topo.hash(b); });
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  return ov;
}

void AddressTable::announce(const AddressEntry& entry, double) {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), entry.origin,
                             [](const AddressEntry& e, NodeId o) { return e.origin < o; });
  const auto i = static_cast<std::size_t>(it - entries_.begin());
  if (it != entries_.end() && it->origin == entry.origin) {
    *it = entry;
    if (!pending_since_.empty()) pending_since_[i] = std::nan("");
    return;
  }
  entries_.insert(it, entry);
  if (!pending_since_.empty()) pending_since_.insert(pending_since_.begin() + static_cast<std::ptrdiff_t>(i), std::nan(""));
}

void AddressTable::withdraw(NodeId origin, double now) {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), origin,
                             [](const AddressEntry& e, NodeId o) { return e.origin < o; });
  if (it == entries_.end() || it->origin != origin) return;
  if (pending_since_.empty()) pending_since_.assign(entries_.size(), std::nan(""));
  double& since = pending_since_[static_cast<std::size_t>(it - entries_.begin())];
  if (std::isnan(since)) since = now;
}

void AddressTable::expire(double now) {
  if (pending_since_.empty()) return;
  std::size_t out = 0;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!std::isnan(pending_since_[i]) && now - pending_since_[i] > kRemovalDelay) continue;
    entries_[out] = entries_[i];
    pending_since_[out++] = pending_since_[i];
  }
  entries_.resize(out);
  pending_since_.resize(out);
}

const AddressEntry* AddressTable::find(NodeId origin, double now) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), origin,
                             [](const AddressEntry& e, NodeId o) { return e.origin < o; });
  if (it == entries_.end() || it->origin != origin) return nullptr;
  if (!pending_since_.empty()) {
    const double since = pending_since_[static_cast<std::size_t>(it - entries_.begin())];
    if (!std::isnan(since) && now - since > kRemovalDelay) return nullptr;
  }
  return &*it;
}

AddressEntry* AddressTable::find_mutable(NodeId origin) {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), origin,
                             [](const AddressEntry& e, NodeId o) { return e.origin < o; });
  return it != entries_.end() && it->origin == origin ? &*it : nullptr;
}

AddressTable& delayed_remove(AddressTable& table, NodeId origin, double now) {
  table.withdraw(origin, now);
  return table;
}

bool accepts_announcement(const Topology& topo, std::span<const unsigned> ks, NodeId receiver, NodeId sender,
                          NodeId origin) {
  const unsigned k = ks[receiver];
  return same_prefix(topo.hash(origin), topo.hash(receiver), k) && same_prefix(topo.hash(sender), topo.hash(receiver), k);
}

bool forwards_to(const Topology& topo, std::span<const unsigned> ks, NodeId at, NodeId next, NodeId origin,
                 Direction direction, bool at_origin) {
  if (next == origin || !same_prefix(topo.hash(at), topo.hash(next), ks[at])) return false;
  if (at_origin) return true;
  return direction == Direction::up ? topo.hash(next) > topo.hash(at) : topo.hash(next) < topo.hash(at);
}

bool closer_sender(const Topology& topo, NodeId origin, NodeId candidate, NodeId current) {
  const std::uint64_t h = topo.hash(origin).value;
  auto gap = [&](NodeId x) {
    const std::uint64_t v = topo.hash(x).value;
    return v > h ? v - h : h - v;
  };
  const std::uint64_t a = gap(candidate);
  const std::uint64_t b = gap(current);
  return a != b ? a < b : topo.hash(candidate) < topo.hash(current);
}

Dissemination disseminate(const Topology& topo, const Overlay& overlay, std::span<const unsigned> ks) {
  const std::size_t n = topo.node_count();
  Dissemination out;
  out.tables.resize(n);
  out.sent.assign(n, 0);
  std::vector<std::uint32_t> seen(n, 0);
  struct Item {
    NodeId node;
    Direction direction;
    std::uint32_t hops;
  };
  std::deque<Item> queue;
  for (NodeId x = 0; x < n; ++x) {
    const std::uint32_t stamp = x + 1;
    seen[x] = stamp;
    queue.clear();
    queue.push_back({x, Direction::up, 0});
    while (!queue.empty()) {
      const Item cur = queue.front();
      queue.pop_front();
      const bool at_origin = cur.node == x;
      for (NodeId w : overlay.neighbors[cur.node]) {
        if (!forwards_to(topo, ks, cur.node, w, x, cur.direction, at_origin)) continue;
        const Direction dir = at_origin ? (topo.hash(w) > topo.hash(x) ? Direction::up : Direction::down) : cur.direction;
        ++out.messages;
        ++out.sent[cur.node];
        if ((dir == Direction::up) != (topo.hash(w) > topo.hash(cur.node))) {
          throw Error(ErrorCode::invariant_violation, "announcement moved toward its origin");
        }
        if (!accepts_announcement(topo, ks, w, cur.node, x)) continue;
        if (seen[w] != stamp) {
          seen[w] = stamp;
          out.tables[w].announce({x, cur.node, dir, cur.hops + 1});
          queue.push_back({w, dir, cur.hops + 1});
        } else if (AddressEntry* e = out.tables[w].find_mutable(x); e && closer_sender(topo, x, cur.node, e->learned_from)) {
          e->learned_from = cur.node;
        }
      }
    }
  }
  return out;
}

HopStats announcement_hop_stats(const Dissemination& d) {
  HopStats s;
  double total = 0.0;
  for (const AddressTable& t : d.tables) {
    for (const AddressEntry& e : t.entries()) {
      total += e.hops;
      s.max = std::max(s.max, e.hops);
      ++s.deliveries;
    }
  }
  s.mean = s.deliveries ? total / static_cast<double>(s.deliveries) : 0.0;
  return s;
}

GroupState build_groups(const Topology& topo, std::span<const double> estimates, unsigned fingers, std::uint64_t seed) {
  GroupState g;
  g.k = group_ks(estimates);
  g.overlay = build_overlay(topo, g.k, fingers, seed);
  g.dissemination = disseminate(topo, g.overlay, g.k);
  return g;
}

PrefixChoice choose_prefix_node(const RoutingTables& tables, const GroupState& groups, NodeId s, NodeId t) {
  const Topology& topo = tables.topology();
  const NameHash ht = topo.hash(t);
  // k_w may exceed k_s by one bit, so only k_s + 1 matching bits guarantee
  // t is in G(w). Closest such node (s itself first), else the longest match.
  const unsigned k = groups.k[s] + 1;
  PrefixChoice c;
  c.w = s;
  c.match = common_prefix_length(topo.hash(s), ht);
  if (c.match < k) {
    Distance best_d = 0.0;
    bool long_enough = false;
    for (const RouteEntry& e : tables.vicinity(s)) {
      const unsigned m = common_prefix_length(topo.hash(e.node), ht);
      const bool enough = m >= k;
      bool take;
      if (enough != long_enough) {
        take = enough;
      } else if (enough) {
        take = e.distance < best_d || (e.distance == best_d && topo.hash(e.node) < topo.hash(c.w));
      } else {
        take = m > c.match || (m == c.match && (e.distance < best_d ||
                                                (e.distance == best_d && topo.hash(e.node) < topo.hash(c.w))));
      }
      if (take) {
        c.w = e.node;
        c.match = m;
        best_d = e.distance;
        long_enough = enough;
      }
    }
  }
  c.usable = static_cast<int>(c.match) >= static_cast<int>(groups.k[s]) - 1 && groups.dissemination.tables[c.w].contains(t);
  return c;
}

Path disco_base_route(const RoutingTables& tables, const GroupState& groups, NodeId s, NodeId t) {
  if (s == t) return {s};
  if (tables.known_distance(s, t)) return tables.known_path(s, t);
  if (groups.dissemination.tables[s].contains(t)) return nd_base_route(tables, s, tables.address(t));
  const PrefixChoice c = choose_prefix_node(tables, groups, s, t);
  if (!c.usable || c.w == s) return {};
  Path p = tables.known_path(s, c.w);
  const Path rest = nd_base_route(tables, c.w, tables.address(t));
  p.insert(p.end(), rest.begin() + 1, rest.end());
  return p;
}

RouteResult route_first_packet_disco(const RoutingTables& tables, const GroupState& groups, const ResolutionDb& db,
                                     NodeId s, NodeId t, Heuristic h) {
  const Topology& topo = tables.topology();
  Path forward = disco_base_route(tables, groups, s, t);
  if (forward.empty()) return resolve_route(tables, db, s, topo.name(t), h);
  if (tables.known_distance(s, t) || h == Heuristic::none) {
    return make_route(topo, std::move(forward), RouteResult::Phase::first_packet, h);
  }
  Path reverse = disco_base_route(tables, groups, t, s);
  if (reverse.empty()) reverse = resolve_route(tables, db, t, topo.name(s), Heuristic::none).hops;
  return make_route(topo, apply_shortcut(forward, reverse, tables, h), RouteResult::Phase::first_packet, h);
}

}  // namespace disco
