#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "disco/metrics.hpp"

using namespace disco;

TEST(Metrics, CdfOfRepeatedValues) {
  const auto cdf = emit_cdf({2, 1, 1});
  ASSERT_EQ(cdf.size(), 2u);
  EXPECT_EQ(cdf[0].first, 1.0);
  EXPECT_DOUBLE_EQ(cdf[0].second, 2.0 / 3.0);
  EXPECT_EQ(cdf[1].first, 2.0);
  EXPECT_EQ(cdf[1].second, 1.0);
  EXPECT_THROW(emit_cdf({}), Error);
}

TEST(Metrics, FormatDoubleRoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 12345.678, 2.0}) EXPECT_EQ(std::stod(format_double(x)), x);
  EXPECT_EQ(format_double(2.0), "2");
}

TEST(Metrics, SamplePairs) {
  const auto all = sample_pairs(10, 5, 1);
  EXPECT_EQ(all.size(), 90u);
  const auto some = sample_pairs(1000, 500, 1);
  EXPECT_EQ(some.size(), 500u);
  for (const auto& [s, t] : some) {
    EXPECT_NE(s, t);
    EXPECT_LT(s, 1000u);
    EXPECT_LT(t, 1000u);
  }
  EXPECT_EQ(some, sample_pairs(1000, 500, 1));
  EXPECT_NE(some, sample_pairs(1000, 500, 2));
}

TEST(Metrics, QuantileIsNearestRank) {
  CongestionMap m{{5, 1, 3, 2, 4}, 15};
  EXPECT_EQ(congestion_quantile(m, 0.0), 1.0);
  EXPECT_EQ(congestion_quantile(m, 0.2), 1.0);
  EXPECT_EQ(congestion_quantile(m, 0.21), 2.0);
  EXPECT_EQ(congestion_quantile(m, 0.5), 3.0);
  EXPECT_EQ(congestion_quantile(m, 1.0), 5.0);
}

TEST(Metrics, StarCongestion) {
  // Centre 0 with leaves 1..6: a flow between two leaves uses both spokes.
  std::vector<std::string> names{"hub"};
  std::vector<Edge> edges;
  for (NodeId i = 1; i <= 6; ++i) {
    names.push_back("leaf" + std::to_string(i));
    edges.push_back({0, i, 1.0});
  }
  const Topology t(names, edges);
  const auto dest = congestion_destinations(t.node_count(), 3);
  std::vector<std::uint64_t> expect(t.edge_count(), 0);
  std::uint64_t hops = 0;
  for (NodeId s = 0; s < t.node_count(); ++s) {
    if (s != 0) ++expect[t.edge_index(0, s)];
    if (dest[s] != 0) ++expect[t.edge_index(0, dest[s])];
    hops += (s != 0) + (dest[s] != 0);
  }
  const CongestionMap m = shortest_path_congestion(t, 3);
  EXPECT_EQ(m.edge_counts, expect);
  EXPECT_EQ(m.total_hops, hops);
  const Network pv = run_static(t, Protocol::path_vector, {}, 3);
  EXPECT_EQ(measure_congestion(pv, 3).edge_counts, expect);
}

TEST(Metrics, CongestionTotalsIdentity) {
  const Topology t = gen_geometric(400, 7.0, 2);
  for (Protocol p : {Protocol::disco, Protocol::s4}) {
    const CongestionMap m = measure_congestion(run_static(t, p, {}, 2), 2);
    std::uint64_t sum = 0;
    for (auto c : m.edge_counts) sum += c;
    EXPECT_EQ(sum, m.total_hops);
  }
}

TEST(Metrics, PathVectorStateOnThreeNodes) {
  const Topology t({"a", "b", "c"}, {{0, 1, 1.0}, {1, 2, 1.0}});
  const auto state = measure_state(run_static(t, Protocol::path_vector, {}, 1));
  ASSERT_EQ(state.size(), 3u);
  for (const auto& s : state) {
    EXPECT_EQ(s.total(), 2u);
    EXPECT_EQ(s.bytes_v4, 2u * 5u);
    EXPECT_EQ(s.bytes_v6, 2u * 17u);
  }
}

TEST(Metrics, DiscoStateParts) {
  const Topology t = gen_gnm(512, 8.0, 3);
  const Network net = run_static(t, Protocol::disco, {}, 3);
  const auto state = measure_state(net);
  const auto sum = summarize_state(state);
  std::size_t resolution = 0;
  for (NodeId v = 0; v < t.node_count(); ++v) {
    const StateBreakdown& s = state[v];
    EXPECT_EQ(s.vicinity_or_cluster, vicinity_size(512));
    EXPECT_EQ(s.landmark_routes, net.landmarks.size() - (net.landmarks.contains(v) ? 1 : 0));
    EXPECT_EQ(s.group_addresses, net.groups->dissemination.tables[v].size());
    EXPECT_GT(s.bytes_v6, s.bytes_v4);
    resolution += s.resolution_entries;
    EXPECT_LE(s.total(), sum.max_entries);
  }
  EXPECT_EQ(resolution, t.node_count());
}

TEST(Metrics, StretchOfShortestPathsIsOne) {
  const Topology t = gen_gnm(200, 6.0, 1);
  const Network pv = run_static(t, Protocol::path_vector, {}, 1);
  const auto pairs = sample_pairs(t.node_count(), 1000, 1);
  const StretchReport r = measure_stretch(pv, pairs);
  EXPECT_TRUE(r.violations.empty());
  EXPECT_DOUBLE_EQ(r.mean_first(), 1.0);
  EXPECT_DOUBLE_EQ(r.max_later(), 1.0);
}

TEST(Metrics, DiscoStretchBoundsHold) {
  const Topology t = gen_geometric(600, 8.0, 4);
  const Network net = run_static(t, Protocol::disco, {}, 4);
  const StretchReport r = measure_stretch(net, sample_pairs(t.node_count(), 3000, 4));
  EXPECT_TRUE(r.violations.empty());
  EXPECT_EQ(r.unreachable, 0u);
  EXPECT_LE(r.max_later(), 3.0 + 1e-9);
  EXPECT_LE(r.max_first(), 7.0 + 1e-9);
  EXPECT_GE(r.mean_later(), 1.0);
}

TEST(Metrics, UsefulFact) {
  const Topology t = gen_gnm(800, 8.0, 5);
  const Network net = run_static(t, Protocol::nddisco, {}, 5);
  EXPECT_EQ(useful_fact_violations(*net.tables, sample_pairs(t.node_count(), 5000, 5)), 0u);
}

TEST(Metrics, CsvHeaders) {
  const Topology t = gen_gnm(64, 4.0, 1);
  const Network net = run_static(t, Protocol::disco, {}, 1);
  std::ostringstream state, cdf;
  write_state_csv(state, t, measure_state(net));
  EXPECT_EQ(state.str().substr(0, state.str().find('\n')).substr(0, 5), "node,");
  write_cdf_csv(cdf, emit_cdf({1, 2}));
  std::istringstream lines(cdf.str());
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  EXPECT_EQ(row, "1,0.5");
}
