#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <tuple>

#include "disco/nddisco.hpp"

using namespace disco;

namespace {

struct Fixture {
  Topology topo;
  std::vector<double> est;
  RoutingTables tables;

  explicit Fixture(Topology t)
      : topo(std::move(t)),
        est(topo.node_count(), static_cast<double>(topo.node_count())),
        tables(converge(topo, elect_landmarks(topo, est, 1), est)) {}
};

}  // namespace

TEST(NDDisco, VicinitySize) {
  EXPECT_EQ(vicinity_size(1024), 102u);  // ceil(sqrt(10240))
  EXPECT_EQ(vicinity_size(3), 2u);
  EXPECT_EQ(vicinity_size(16384), 479u);  // ceil(478.9)
}

TEST(NDDisco, VicinityIsKNearestByDistanceThenTieRank) {
  const Topology t = gen_geometric(300, 6.0, 2);
  const std::vector<double> est(t.node_count(), 300.0);
  const auto vic = compute_vicinities(t, est);
  const std::size_t k = vicinity_size(300);
  for (NodeId v = 0; v < t.node_count(); v += 17) {
    const ShortestPathTree tree = shortest_path_tree(t, v);
    std::vector<NodeId> order;
    for (NodeId u = 0; u < t.node_count(); ++u)
      if (u != v) order.push_back(u);
    std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
      return std::make_tuple(tree.dist[a], tie_rank(t.hash(a))) < std::make_tuple(tree.dist[b], tie_rank(t.hash(b)));
    });
    order.resize(k);
    std::sort(order.begin(), order.end());
    ASSERT_EQ(vic[v].size(), k);
    for (std::size_t i = 0; i < k; ++i) {
      EXPECT_EQ(vic[v][i].node, order[i]);
      EXPECT_EQ(vic[v][i].distance, tree.dist[order[i]]);
      // The next hop lies on a shortest path.
      const NodeId nh = vic[v][i].next_hop;
      EXPECT_EQ(t.edge_weight(v, nh) + shortest_path_tree(t, nh).dist[order[i]], tree.dist[order[i]]);
    }
  }
}

TEST(NDDisco, ExplicitRouteRoundTrip) {
  const Topology t = gen_gnm(200, 6.0, 4);
  const Path p = shortest_path(t, 3, 150).path;
  const ExplicitRoute r = encode_explicit_route(t, p);
  ASSERT_EQ(r.labels.size(), p.size() - 1);
  std::size_t bits = 0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    bits += static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(t.degree(p[i])))));
  }
  EXPECT_EQ(r.bit_size, bits);
  EXPECT_EQ(decode_explicit_route(t, p.front(), r.labels), p);
}

TEST(NDDisco, DecodeRejectsBadLabel) {
  const Topology t = gen_gnm(50, 4.0, 4);
  const std::vector<std::uint32_t> bad{static_cast<std::uint32_t>(t.degree(0))};
  EXPECT_THROW(decode_explicit_route(t, 0, bad), Error);
}

TEST(NDDisco, AddressDecodesToOwner) {
  const Fixture f(gen_gnm(400, 6.0, 3));
  for (NodeId v = 0; v < f.topo.node_count(); ++v) {
    const Address& a = f.tables.address(v);
    ASSERT_TRUE(f.tables.landmarks().contains(a.landmark));
    const Path p = decode_explicit_route(f.topo, a.landmark, a.route.labels);
    EXPECT_EQ(p.back(), v);
    EXPECT_EQ(f.topo.path_length(p), f.tables.landmark_distance(v, a.landmark));
  }
}

TEST(NDDisco, StretchBounds) {
  const Fixture f(gen_geometric(400, 7.0, 5));
  for (NodeId s = 0; s < f.topo.node_count(); s += 9) {
    const ShortestPathTree tree = shortest_path_tree(f.topo, s);
    for (NodeId t = 0; t < f.topo.node_count(); t += 7) {
      if (s == t) continue;
      const RouteResult later = route_later_packet_nd(f.tables, s, t, Heuristic::none);
      ASSERT_TRUE(later.delivered);
      EXPECT_TRUE(f.topo.is_walk(later.hops));
      EXPECT_EQ(later.hops.front(), s);
      EXPECT_EQ(later.hops.back(), t);
      EXPECT_GE(later.length, tree.dist[t] - 1e-9);
      EXPECT_LE(later.length, 3 * tree.dist[t] + 1e-9);
      const RouteResult first = route_first_packet_nd(f.tables, s, f.tables.address(t), Heuristic::none);
      // s -> l_t -> t is at most d(s,t) + 2 d(l_t,t).
      EXPECT_LE(first.length, tree.dist[t] + 2 * f.tables.landmark_distance(t, f.tables.closest_landmark(t)) + 1e-9);
    }
  }
}

TEST(NDDisco, KnownPathsAreShortest) {
  const Fixture f(gen_gnm(300, 6.0, 6));
  for (NodeId v = 0; v < f.topo.node_count(); v += 11) {
    for (const RouteEntry& e : f.tables.vicinity(v)) {
      const Path p = f.tables.known_path(v, e.node);
      EXPECT_EQ(f.topo.path_length(p), e.distance);
      EXPECT_EQ(*f.tables.known_distance(v, e.node), e.distance);
    }
  }
}

TEST(Shortcut, ParseAndPrintHeuristics) {
  for (Heuristic h : kAllHeuristics) EXPECT_EQ(parse_heuristic(to_string(h)), h);
  EXPECT_THROW(parse_heuristic("fastest"), Error);
}

TEST(Shortcut, NeverLengthens) {
  const Fixture f(gen_gnm(500, 6.0, 7));
  for (NodeId s = 0; s < f.topo.node_count(); s += 23) {
    for (NodeId t = 1; t < f.topo.node_count(); t += 19) {
      if (s == t) continue;
      const Path fwd = nd_base_route(f.tables, s, f.tables.address(t));
      const Path rev = nd_base_route(f.tables, t, f.tables.address(s));
      const double base = f.topo.path_length(fwd);
      for (Heuristic h : kAllHeuristics) {
        const Path p = apply_shortcut(fwd, rev, f.tables, h);
        EXPECT_TRUE(f.topo.is_walk(p));
        EXPECT_EQ(p.front(), s);
        EXPECT_EQ(p.back(), t);
        if (h != Heuristic::shorter_of_forward_reverse) {
          EXPECT_LE(f.topo.path_length(p), base + 1e-9);
        }
      }
      EXPECT_LE(f.topo.path_length(to_destination(fwd, f.tables)), base + 1e-9);
    }
  }
}

TEST(Shortcut, ToDestinationSplicesAtFirstKnower) {
  // Path a-b-c-d plus a chord b-d of weight 1.5. Vicinities cover all four
  // nodes, so a itself splices in its stored path a,b,d.
  const Topology t({"a", "b", "c", "d"}, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {1, 3, 1.5}});
  const std::vector<double> est(4, 4.0);
  const RoutingTables tables = converge(t, elect_landmarks(t, est, 1), est);
  const Path p = to_destination({0, 1, 2, 3}, tables);
  EXPECT_EQ(p, (Path{0, 1, 3}));
}
