#include <gtest/gtest.h>

#include <cmath>

#include "disco/nameplane.hpp"
#include "disco/topology.hpp"

using namespace disco;

TEST(Nameplane, LandmarkProbability) {
  EXPECT_DOUBLE_EQ(landmark_probability(1024), std::sqrt(10.0 / 1024));
  EXPECT_EQ(landmark_probability(1), 1.0);
  EXPECT_DOUBLE_EQ(landmark_probability(2), std::sqrt(0.5));
}

TEST(Nameplane, LandmarkCountMatchesExpectation) {
  // Expected count is n * sqrt(log2 n / n) = sqrt(n log2 n); average it over seeds.
  const Topology t = gen_gnm(4096, 8.0, 1);
  const std::vector<double> est(t.node_count(), 4096.0);
  double total = 0;
  const int seeds = 40;
  for (int s = 1; s <= seeds; ++s) total += elect_landmarks(t, est, s).size();
  const double expected = std::sqrt(4096.0 * 12.0);
  // Binomial sd per draw is about sqrt(221); the mean over 40 draws is within 3 sd.
  EXPECT_NEAR(total / seeds, expected, 3 * std::sqrt(expected / seeds));
}

TEST(Nameplane, LandmarkSetIndexing) {
  const Topology t = gen_gnm(500, 6.0, 2);
  const std::vector<double> est(t.node_count(), 500.0);
  const LandmarkSet l = elect_landmarks(t, est, 3);
  ASSERT_GT(l.size(), 0u);
  for (std::size_t i = 0; i < l.size(); ++i) EXPECT_EQ(l.slot[l.members[i]], static_cast<int>(i));
  EXPECT_TRUE(std::is_sorted(l.members.begin(), l.members.end()));
}

TEST(Nameplane, FlipOnlyOnFactorTwo) {
  EXPECT_FALSE(should_flip_landmark_status(1000, 1999));
  EXPECT_TRUE(should_flip_landmark_status(1000, 2000));
  EXPECT_TRUE(should_flip_landmark_status(1000, 500));
  EXPECT_FALSE(should_flip_landmark_status(1000, 501));
}

TEST(Nameplane, ReelectionKeepsStableNodes) {
  const Topology t = gen_gnm(400, 6.0, 5);
  const auto draw = seeded_draw(t, 9);
  std::vector<double> est(t.node_count(), 400.0);
  const LandmarkSet a = elect_landmarks(t, est, draw);
  for (auto& e : est) e = 700.0;  // below the factor-two threshold
  const LandmarkSet b = reelect_landmarks(a, t, est, draw);
  EXPECT_EQ(a.members, b.members);
  for (auto& e : est) e = 1600.0;
  const LandmarkSet c = reelect_landmarks(a, t, est, draw);
  EXPECT_LT(c.size(), a.size());
  for (NodeId v : c.members) EXPECT_TRUE(a.contains(v));  // same draws, lower probability
}

TEST(Nameplane, ParseErrorModel) {
  EXPECT_EQ(parse_error_model("none").kind, ErrorModel::Kind::none);
  const ErrorModel u = parse_error_model("uniform:0.4");
  EXPECT_EQ(u.kind, ErrorModel::Kind::uniform_relative);
  EXPECT_DOUBLE_EQ(u.fraction, 0.4);
  EXPECT_EQ(parse_error_model("synopsis:64").synopsis_bytes, 64u);
  EXPECT_EQ(to_string(u), "uniform:0.4");
  EXPECT_THROW(parse_error_model("uniform:x"), Error);
  EXPECT_THROW(parse_error_model("gaussian"), Error);
}

TEST(Nameplane, UniformErrorBounds) {
  const Topology t = gen_gnm(1000, 6.0, 2);
  const auto est = estimate_n(t, parse_error_model("uniform:0.6"), 4);
  double lo = 1e9, hi = 0, mean = 0;
  for (double e : est) {
    lo = std::min(lo, e);
    hi = std::max(hi, e);
    mean += e / est.size();
  }
  EXPECT_GE(lo, 400.0);
  EXPECT_LE(hi, 1600.0);
  EXPECT_LT(lo, 450.0);  // the range is actually used
  EXPECT_GT(hi, 1550.0);
  EXPECT_NEAR(mean, 1000.0, 40.0);
}

TEST(Nameplane, SketchDiffusionEstimate) {
  // Stochastic averaging over 64 bitmaps has a relative standard error near 0.78/8.
  const Topology t = gen_gnm(2000, 6.0, 3);
  const auto est = estimate_n(t, parse_error_model("synopsis:256"), 1);
  for (double e : est) EXPECT_EQ(e, est[0]);  // flooding converges to one sketch
  EXPECT_NEAR(est[0] / 2000.0, 1.0, 0.3);
}

TEST(Nameplane, SketchMergeIsUnion) {
  FmSketch a(16), b(16), ab(16);
  for (int i = 0; i < 50; ++i) {
    a.add(hash_name("a" + std::to_string(i)), 1);
    b.add(hash_name("b" + std::to_string(i)), 1);
    ab.add(hash_name("a" + std::to_string(i)), 1);
    ab.add(hash_name("b" + std::to_string(i)), 1);
  }
  EXPECT_TRUE(a.merge(b));
  EXPECT_FALSE(a.merge(b));
  EXPECT_EQ(a, ab);
}
