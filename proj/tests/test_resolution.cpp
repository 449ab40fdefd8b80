#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "disco/resolution.hpp"

using namespace disco;

namespace {

LandmarkSet every_kth(const Topology& t, std::size_t k) {
  LandmarkSet l;
  l.slot.assign(t.node_count(), -1);
  l.last_flip_estimate.assign(t.node_count(), static_cast<double>(t.node_count()));
  for (NodeId v = 0; v < t.node_count(); v += k) {
    l.slot[v] = static_cast<std::int32_t>(l.members.size());
    l.members.push_back(v);
  }
  return l;
}

}  // namespace

TEST(Resolution, RingOwnerIsClockwiseSuccessor) {
  const Topology t = gen_gnm(200, 6.0, 1);
  const LandmarkSet l = every_kth(t, 10);
  const ConsistentHashRing ring(t, l.members, 4);
  const auto& pts = ring.points();
  ASSERT_EQ(pts.size(), l.size() * 4);
  EXPECT_EQ(ring.owner_of(pts[3].position), pts[3].landmark);
  EXPECT_EQ(ring.owner_of(NameHash{pts[3].position.value + 1}), pts[4].landmark);
  EXPECT_EQ(ring.owner_of(NameHash{pts.back().position.value + 1}), pts.front().landmark);
  const NameHash p0 = hash_name(t.name(l.members[0]) + "#0");
  EXPECT_TRUE(std::any_of(pts.begin(), pts.end(),
                          [&](const RingPoint& p) { return p.position == p0 && p.landmark == l.members[0]; }));
}

TEST(Resolution, RingBalance) {
  const Topology t = gen_gnm(4096, 8.0, 2);
  const LandmarkSet l = every_kth(t, 40);
  const ConsistentHashRing ring(t, l.members, 32);
  std::map<NodeId, std::size_t> load;
  for (NodeId v = 0; v < t.node_count(); ++v) ++load[ring.owner_of(t.hash(v))];
  std::size_t max = 0;
  for (const auto& [_, c] : load) max = std::max(max, c);
  const double mean = static_cast<double>(t.node_count()) / l.size();
  EXPECT_EQ(load.size(), l.size());
  EXPECT_LT(max, 2.0 * mean);
}

TEST(Resolution, RemovingALandmarkOnlyMovesItsKeys) {
  const Topology t = gen_gnm(1000, 6.0, 3);
  const LandmarkSet l = every_kth(t, 20);
  std::vector<NodeId> fewer(l.members.begin() + 1, l.members.end());
  const ConsistentHashRing a(t, l.members), b(t, fewer);
  for (NodeId v = 0; v < t.node_count(); ++v) {
    const NodeId before = a.owner_of(t.hash(v));
    if (before != l.members[0]) {
      EXPECT_EQ(b.owner_of(t.hash(v)), before);
    }
  }
}

TEST(Resolution, InsertLookupAndTimeout) {
  const Topology t = gen_gnm(300, 6.0, 4);
  const std::vector<double> est(t.node_count(), 300.0);
  const RoutingTables tables = converge(t, elect_landmarks(t, est, 2), est);
  ResolutionDb db(t, tables.landmarks());
  const NodeId owner = db.insert(17, tables.address(17), 0.0);
  EXPECT_EQ(owner, db.owner_of(t.hash(17)));
  LookupResult r = db.lookup(t.name(17), 100.0);
  ASSERT_EQ(r.status, LookupStatus::found);
  EXPECT_EQ(r.entry->node, 17u);
  EXPECT_EQ(r.entry->address, tables.address(17));
  EXPECT_EQ(db.lookup(t.name(17), 21 * 60.0 + 1).status, LookupStatus::expired);
  EXPECT_EQ(db.lookup(t.name(18), 0.0).status, LookupStatus::miss);
  db.insert(17, tables.address(17), 1000.0);  // refresh
  EXPECT_EQ(db.lookup(t.name(17), 21 * 60.0 + 1).status, LookupStatus::found);
  EXPECT_EQ(db.shard_size(owner), 1u);
}

TEST(Resolution, ResolvedRoutesDeliver) {
  const Topology t = gen_geometric(400, 7.0, 6);
  const std::vector<double> est(t.node_count(), 400.0);
  const RoutingTables tables = converge(t, elect_landmarks(t, est, 2), est);
  const ResolutionDb db = build_resolution_db(tables);
  std::size_t total = 0;
  for (NodeId l : tables.landmarks().members) total += db.shard_size(l);
  EXPECT_EQ(total, t.node_count());
  for (NodeId s = 0; s < t.node_count(); s += 13) {
    for (NodeId d = 5; d < t.node_count(); d += 31) {
      const RouteResult r = resolve_route(tables, db, s, t.name(d), Heuristic::none);
      ASSERT_TRUE(r.delivered);
      EXPECT_TRUE(t.is_walk(r.hops));
      EXPECT_EQ(r.hops.back(), d);
      // Passes through the owner of h(d).
      EXPECT_NE(std::find(r.hops.begin(), r.hops.end(), db.owner_of(t.hash(d))), r.hops.end());
    }
  }
}
