#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "disco/nddisco.hpp"
#include "disco/resolution.hpp"

namespace disco {

// floor(log2(sqrt(n / log2 n))), at least 0.
unsigned group_k(double n_est);

// Recomputes k only after the estimate drifts by at least `hysteresis`
// (relative) from the estimate k was last computed at.
class GroupTracker {
 public:
  explicit GroupTracker(double n_est, double hysteresis = 0.10);
  unsigned update(double n_est);
  unsigned k() const { return k_; }

 private:
  double anchor_;
  double hysteresis_;
  unsigned k_;
};

std::vector<unsigned> group_ks(std::span<const double> estimates);

// Interval of hashes sharing the top k bits with h.
struct HashInterval {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
};
HashInterval group_interval(NameHash h, unsigned k);

// Nodes x with v in G'(x): all of them agree under the largest k in use.
std::vector<NodeId> core_group(const Topology& topo, std::span<const unsigned> ks, NodeId v);

// Nodes sorted by hash; answers closest-hash queries within a hash interval.
class HashIndex {
 public:
  explicit HashIndex(const Topology& topo);
  // Closest node to `target` by |hash - target| with hash in [lo, hi], other than
  // `exclude`; ties go to the smaller hash. kNoNode if none.
  NodeId closest(std::uint64_t target, HashInterval range, NodeId exclude) const;
  const std::vector<NodeId>& ring() const { return order_; }
  std::size_t position(NodeId v) const { return position_[v]; }

 private:
  const Topology* topo_;
  std::vector<NodeId> order_;
  std::vector<std::uint64_t> hashes_;
  std::vector<std::size_t> position_;
};

struct OverlayLinks {
  NodeId successor = kNoNode;
  NodeId predecessor = kNoNode;
  std::vector<NodeId> fingers;
  // Finger target keys drawn for each finger (same order as fingers).
  std::vector<std::uint64_t> finger_keys;
  bool operator==(const OverlayLinks&) const = default;
};

struct Overlay {
  std::vector<OverlayLinks> links;
  // Undirected union of all links, sorted by hash, self excluded.
  std::vector<std::vector<NodeId>> neighbors;
  bool operator==(const Overlay&) const = default;
};

// Ring links from the global hash order plus `fingers` Symphony links per node
// inside its own group.
Overlay build_overlay(const Topology& topo, std::span<const unsigned> ks, unsigned fingers, std::uint64_t seed);

enum class Direction : std::uint8_t { up, down };

struct AddressEntry {
  NodeId origin = kNoNode;
  NodeId learned_from = kNoNode;
  Direction direction = Direction::up;
  std::uint32_t hops = 0;
  bool operator==(const AddressEntry&) const = default;
};

class AddressTable {
 public:
  static constexpr double kRemovalDelay = 30.0;

  // Inserts or replaces; clears any pending removal.
  void announce(const AddressEntry& entry, double now = 0.0);
  // Marks the entry pending; it disappears kRemovalDelay after `now`.
  void withdraw(NodeId origin, double now);
  void expire(double now);

  const AddressEntry* find(NodeId origin, double now = 0.0) const;
  AddressEntry* find_mutable(NodeId origin);
  bool contains(NodeId origin, double now = 0.0) const { return find(origin, now) != nullptr; }

  std::size_t size() const { return entries_.size(); }
  const std::vector<AddressEntry>& entries() const { return entries_; }
  bool operator==(const AddressTable& o) const { return entries_ == o.entries_; }

 private:
  std::vector<AddressEntry> entries_;  // sorted by origin
  std::vector<double> pending_since_;  // NaN when not pending
};

AddressTable& delayed_remove(AddressTable& table, NodeId origin, double now);

struct Dissemination {
  std::vector<AddressTable> tables;
  std::uint64_t messages = 0;
  std::vector<std::uint64_t> sent;  // per node
  bool operator==(const Dissemination& o) const { return tables == o.tables && messages == o.messages && sent == o.sent; }
};

// Accept x's announcement from u at w iff both x and u are in G(w); forward
// once, away from h(x), to overlay neighbors inside G(w).
bool accepts_announcement(const Topology& topo, std::span<const unsigned> ks, NodeId receiver, NodeId sender,
                          NodeId origin);
bool forwards_to(const Topology& topo, std::span<const unsigned> ks, NodeId at, NodeId next, NodeId origin,
                 Direction direction, bool at_origin);
// Replaces learned_from when the new sender's hash is closer to the origin's.
bool closer_sender(const Topology& topo, NodeId origin, NodeId candidate, NodeId current);

Dissemination disseminate(const Topology& topo, const Overlay& overlay, std::span<const unsigned> ks);

struct HopStats {
  double mean = 0.0;
  std::uint32_t max = 0;
  std::uint64_t deliveries = 0;
};
HopStats announcement_hop_stats(const Dissemination& d);

struct GroupState {
  std::vector<unsigned> k;
  Overlay overlay;
  Dissemination dissemination;
};

GroupState build_groups(const Topology& topo, std::span<const double> estimates, unsigned fingers, std::uint64_t seed);

// Closest w in V(s) u {s} whose hash shares at least k_s + 1 bits with h(t)
// (ties: smaller hash); failing that the longest match. Usable when it
// matches k_s - 1 bits or more and holds t's address.
struct PrefixChoice {
  NodeId w = kNoNode;
  unsigned match = 0;
  bool usable = false;
};
PrefixChoice choose_prefix_node(const RoutingTables& tables, const GroupState& groups, NodeId s, NodeId t);

// s..t without shortcutting, or empty if resolution is needed.
Path disco_base_route(const RoutingTables& tables, const GroupState& groups, NodeId s, NodeId t);

RouteResult route_first_packet_disco(const RoutingTables& tables, const GroupState& groups, const ResolutionDb& db,
                                     NodeId s, NodeId t, Heuristic h);

}  // namespace disco
