#include <gtest/gtest.h>

#include <random>

#include "sidewalk/widthmap.hpp"
#include "support/oracles.hpp"

using namespace sidewalk;

namespace {

PathSegment seg(std::vector<Point2> pts, double width, std::string id = "") {
  return {Polyline(std::move(pts)), width, std::move(id)};
}

std::vector<bool> all_allowed(const WidthGraph& g) { return std::vector<bool>(g.nodes.size(), true); }

MajorPathRecord record(double length, WidthCategory full, WidthCategory free) {
  return {"r", Polyline({{0, 0}, {length, 0}}), full, free, 0.0, {}};
}

}  // namespace

TEST(Categorize, ClosedLowerBins) {
  EXPECT_EQ(categorize(0.5), WidthCategory::kLt090);
  EXPECT_EQ(categorize(0.9), WidthCategory::kW090_180);
  EXPECT_EQ(categorize(1.8), WidthCategory::kW180_290);
  EXPECT_EQ(categorize(2.9), WidthCategory::kGt290);
  EXPECT_EQ(categorize(3.2), WidthCategory::kGt290);
  EXPECT_EQ(categorize(0.0), WidthCategory::kLt090);
  EXPECT_THROW(categorize(-0.1), ValidationError);
  EXPECT_STREQ(category_name(WidthCategory::kW090_180), "0.9-1.8");
  EXPECT_EQ(parse_category(">2.9"), WidthCategory::kGt290);
}

TEST(Penalty, PowersOfBase) {
  EXPECT_EQ(penalty(WidthCategory::kGt290, 10), 1.0);
  EXPECT_EQ(penalty(WidthCategory::kLt090, 10), 1000.0);
  for (double base : {1.5, 2.0, 7.0, 10.0}) {
    EXPECT_EQ(penalty(WidthCategory::kW090_180, base) / penalty(WidthCategory::kW180_290, base), base);
  }
  EXPECT_THROW(penalty(WidthCategory::kUnknown, 10), ValidationError);
  EXPECT_THROW(penalty(WidthCategory::kGt290, 1.0), ValidationError);
}

TEST(BuildGraph, SharedEndpointsAndSnapping) {
  const auto g = build_graph({seg({{0, 0}, {5, 0}}, 1.0), seg({{5, 0}, {5, 4}}, 3.0)}, 10);
  EXPECT_EQ(g.nodes.size(), 3u);
  ASSERT_EQ(g.edges.size(), 2u);
  EXPECT_EQ(g.edges[0].weight, 500.0);
  EXPECT_EQ(g.edges[1].weight, 4.0);

  const auto snapped = build_graph({seg({{0, 0}, {5, 0}}, 1.0), seg({{5.04, 0}, {9, 0}}, 1.0)}, 10);
  EXPECT_EQ(snapped.nodes.size(), 3u);
  const auto apart = build_graph({seg({{0, 0}, {5, 0}}, 1.0), seg({{5.06, 0}, {9, 0}}, 1.0)}, 10);
  EXPECT_EQ(apart.nodes.size(), 4u);
}

TEST(BuildGraph, UnknownWidthSegmentsExcluded) {
  const auto g = build_graph({seg({{0, 0}, {5, 0}}, 1.0), seg({{5, 0}, {5, 4}}, 3.0)}, 10, 0.05, {true, false});
  EXPECT_EQ(g.edges.size(), 1u);
  EXPECT_EQ(g.nodes.size(), 2u);
}

TEST(ShortestRoute, TrivialAndParallel) {
  // Long wide detour (length 12) against a short narrow link (length 5).
  const auto g = build_graph({seg({{0, 0}, {5, 0}}, 0.5), seg({{0, 0}, {0, 3.5}, {5, 3.5}, {5, 0}}, 3.5)}, 10);
  const auto same = shortest_route(g, 0, 0, all_allowed(g));
  ASSERT_TRUE(same);
  EXPECT_TRUE(same->edges.empty());
  EXPECT_EQ(same->weight, 0.0);

  const std::size_t a = 0, b = g.nodes.size() - 1;
  const auto r = shortest_route(g, a, b, all_allowed(g));
  ASSERT_TRUE(r);
  ASSERT_EQ(r->edges.size(), 1u);
  EXPECT_EQ(g.edges[r->edges[0]].category, WidthCategory::kGt290);
  EXPECT_EQ(r->weight, 12.0);

  EXPECT_THROW(shortest_route(g, a, b, std::vector<bool>(g.nodes.size(), false)), ValidationError);
}

TEST(ShortestRoute, DisconnectedIsNone) {
  const auto g = build_graph({seg({{0, 0}, {5, 0}}, 1.0), seg({{10, 0}, {15, 0}}, 1.0)}, 10);
  EXPECT_FALSE(shortest_route(g, 0, 3, all_allowed(g)));
}

TEST(ShortestRoute, TieBreakPrefersSmallerNodeSequence) {
  // Two equal routes from (0,0) to (2,0): via (1,-1) (node 1) or via (1,1) (node 2).
  const double d = std::sqrt(2.0);
  const auto g = build_graph({seg({{0, 0}, {1, 1}}, 3), seg({{1, 1}, {2, 0}}, 3), seg({{0, 0}, {1, -1}}, 3),
                              seg({{1, -1}, {2, 0}}, 3)},
                             10);
  const auto r = shortest_route(g, 0, 3, all_allowed(g));
  ASSERT_TRUE(r);
  EXPECT_EQ(r->nodes, (std::vector<std::size_t>{0, 1, 3}));
  EXPECT_NEAR(r->weight, 2 * d, 1e-12);
}

TEST(ShortestRoute, MatchesExhaustiveEnumeration) {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> coord(0, 100), width(0.2, 4.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Point2> pts;
    for (int i = 0; i < 12; ++i) pts.push_back({coord(rng), coord(rng)});
    std::vector<PathSegment> segs;
    std::uniform_int_distribution<int> pick(0, 11);
    for (int e = 0; e < 20; ++e) {
      const int a = pick(rng), b = pick(rng);
      if (a != b) segs.push_back(seg({pts[a], pts[b]}, width(rng)));
    }
    const auto g = build_graph(segs, 10);
    std::vector<oracle::GraphEdge> edges;
    for (const auto& e : g.edges) edges.push_back({e.a, e.b, e.weight});
    for (std::size_t s = 0; s < g.nodes.size(); ++s) {
      for (std::size_t t = 0; t < g.nodes.size(); ++t) {
        const auto r = shortest_route(g, s, t, all_allowed(g));
        const double best = oracle::enumerate_min_path(g.nodes.size(), edges, s, t, all_allowed(g));
        if (!r) {
          EXPECT_TRUE(std::isinf(best));
        } else {
          EXPECT_EQ(r->weight, best);
        }
      }
    }
  }
}

TEST(CompareStats, SingleCell) {
  const auto s = compare_stats({record(3, WidthCategory::kGt290, WidthCategory::kGt290)});
  EXPECT_EQ(s.full_pct[3], 100.0);
  EXPECT_EQ(s.free_pct[3], 100.0);
  EXPECT_EQ(s.table_m[3][3], 3.0);
}

TEST(CompareStats, UnknownExcludedFromKnownShares) {
  const auto s = compare_stats({record(6, WidthCategory::kGt290, WidthCategory::kW090_180),
                                record(2, WidthCategory::kW180_290, WidthCategory::kUnknown),
                                record(2, WidthCategory::kGt290, WidthCategory::kGt290)});
  EXPECT_DOUBLE_EQ(s.unknown_pct, 20.0);
  EXPECT_DOUBLE_EQ(s.free_pct[1], 75.0);
  EXPECT_DOUBLE_EQ(s.full_pct[3], 100.0);
  EXPECT_DOUBLE_EQ(s.full_pct_all[2], 20.0);
  EXPECT_DOUBLE_EQ(s.full_given_free_pct[1][3], 100.0);
  const auto j = stats_to_json(s);
  EXPECT_EQ(j["length_m"][">2.9"]["0.9-1.8"], 6.0);
  EXPECT_NE(stats_to_text(s).find("unknown"), std::string::npos);
}

TEST(CompareStats, EmptyIsError) { EXPECT_THROW(compare_stats({}), ValidationError); }
