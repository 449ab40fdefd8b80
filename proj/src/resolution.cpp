#include "disco/resolution.hpp"

#include <algorithm>

namespace disco {

ConsistentHashRing::ConsistentHashRing(const Topology& topo, std::span<const NodeId> landmarks,
                                       unsigned virtual_points) {
  if (landmarks.empty()) throw Error(ErrorCode::invalid_argument, "consistent hashing needs a landmark");
  if (virtual_points == 0) throw Error(ErrorCode::invalid_argument, "at least one virtual point per landmark");
  for (NodeId l : landmarks) {
    for (unsigned i = 0; i < virtual_points; ++i) {
      points_.push_back({hash_name(topo.name(l) + "#" + std::to_string(i)), l});
    }
  }
  std::sort(points_.begin(), points_.end(), [&](const RingPoint& a, const RingPoint& b) {
    return a.position != b.position ? a.position < b.position : topo.hash(a.landmark) < topo.hash(b.landmark);
  });
}

NodeId ConsistentHashRing::owner_of(NameHash key) const {
  auto it = std::lower_bound(points_.begin(), points_.end(), key,
                             [](const RingPoint& p, NameHash k) { return p.position < k; });
  return it == points_.end() ? points_.front().landmark : it->landmark;
}

ResolutionDb::ResolutionDb(const Topology& topo, const LandmarkSet& landmarks, unsigned virtual_points,
                           SoftStateTimers timers)
    : topo_(&topo),
      slot_(landmarks.slot),
      ring_(topo, landmarks.members, virtual_points),
      timers_(timers),
      shards_(landmarks.size()) {}

NodeId ResolutionDb::insert(NodeId node, const Address& address, double now) {
  const NameHash key = topo_->hash(node);
  const NodeId owner = ring_.owner_of(key);
  shards_[static_cast<std::size_t>(slot_[owner])][key.value] =
      ResolutionEntry{topo_->name(node), node, address, now};
  return owner;
}

LookupResult ResolutionDb::lookup(std::string_view name, double now) const {
  const NameHash key = hash_name(name);
  LookupResult r;
  r.owner = ring_.owner_of(key);
  const auto& shard = shards_[static_cast<std::size_t>(slot_[r.owner])];
  auto it = shard.find(key.value);
  if (it == shard.end() || it->second.name != name) return r;
  r.entry = &it->second;
  r.status = now - it->second.inserted_at > timers_.timeout ? LookupStatus::expired : LookupStatus::found;
  return r;
}

const std::map<std::uint64_t, ResolutionEntry>& ResolutionDb::shard(NodeId landmark) const {
  if (landmark >= slot_.size() || slot_[landmark] < 0) {
    throw Error(ErrorCode::invalid_argument, "not a landmark");
  }
  return shards_[static_cast<std::size_t>(slot_[landmark])];
}

ResolutionDb build_resolution_db(const RoutingTables& tables, unsigned virtual_points, double now) {
  ResolutionDb db(tables.topology(), tables.landmarks(), virtual_points);
  for (NodeId v = 0; v < tables.topology().node_count(); ++v) db.insert(v, tables.address(v), now);
  return db;
}

RouteResult resolve_route(const RoutingTables& tables, const ResolutionDb& db, NodeId s, std::string_view name,
                          Heuristic h, double now) {
  const Topology& topo = tables.topology();
  const LookupResult found = db.lookup(name, now);
  Path to_owner = tables.known_path(s, found.owner);
  if (found.status != LookupStatus::found) {
    RouteResult r = make_route(topo, std::move(to_owner), RouteResult::Phase::first_packet, h);
    r.fallback = true;
    r.delivered = false;
    return r;
  }
  const RouteResult rest = route_first_packet_nd(tables, found.owner, found.entry->address, h);
  to_owner.insert(to_owner.end(), rest.hops.begin() + 1, rest.hops.end());
  RouteResult r = make_route(topo, std::move(to_owner), RouteResult::Phase::first_packet, h);
  r.fallback = true;
  return r;
}

}  // namespace disco
