#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "disco/nddisco.hpp"

namespace disco {

struct RingPoint {
  NameHash position;
  NodeId landmark = kNoNode;
};

// Each landmark sits at `virtual_points` positions hash(name + "#" + i).
class ConsistentHashRing {
 public:
  ConsistentHashRing(const Topology& topo, std::span<const NodeId> landmarks, unsigned virtual_points = 32);

  // Landmark of the first point at or clockwise after key.
  NodeId owner_of(NameHash key) const;
  const std::vector<RingPoint>& points() const { return points_; }

 private:
  std::vector<RingPoint> points_;
};

struct SoftStateTimers {
  double refresh = 10 * 60.0;
  double timeout = 21 * 60.0;
};

struct ResolutionEntry {
  std::string name;
  NodeId node = kNoNode;
  Address address;
  double inserted_at = 0.0;
  bool operator==(const ResolutionEntry&) const = default;
};

enum class LookupStatus { found, expired, miss };

struct LookupResult {
  LookupStatus status = LookupStatus::miss;
  NodeId owner = kNoNode;
  const ResolutionEntry* entry = nullptr;
};

class ResolutionDb {
 public:
  ResolutionDb(const Topology& topo, const LandmarkSet& landmarks, unsigned virtual_points = 32,
               SoftStateTimers timers = {});

  // Overwrites any previous entry; returns the owning landmark.
  NodeId insert(NodeId node, const Address& address, double now);
  LookupResult lookup(std::string_view name, double now) const;

  NodeId owner_of(NameHash key) const { return ring_.owner_of(key); }
  const ConsistentHashRing& ring() const { return ring_; }
  const SoftStateTimers& timers() const { return timers_; }

  // Keyed by NameHash value.
  const std::map<std::uint64_t, ResolutionEntry>& shard(NodeId landmark) const;
  std::size_t shard_size(NodeId landmark) const { return shard(landmark).size(); }

  bool operator==(const ResolutionDb& other) const { return shards_ == other.shards_; }

 private:
  const Topology* topo_;
  std::vector<std::int32_t> slot_;
  ConsistentHashRing ring_;
  SoftStateTimers timers_;
  std::vector<std::map<std::uint64_t, ResolutionEntry>> shards_;
};

// Every node inserts its current address at `now`.
ResolutionDb build_resolution_db(const RoutingTables& tables, unsigned virtual_points = 32, double now = 0.0);

// s -> owner of h(t) over landmark routes, then the owner's name-dependent
// route to the address it stored. Undelivered when the lookup fails.
RouteResult resolve_route(const RoutingTables& tables, const ResolutionDb& db, NodeId s, std::string_view name,
                          Heuristic h, double now = 0.0);

}  // namespace disco
