#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sidewalk/obstacles.hpp"
#include "support/oracles.hpp"

using namespace sidewalk;

namespace {

PointCloud cloud_of(const std::vector<Point2>& pts) {
  PointCloud c;
  for (const auto p : pts) c.points.push_back({p.x, p.y, 0.5});
  return c;
}

std::vector<Point2> blob(std::mt19937& rng, Point2 c, double r, int n) {
  std::uniform_real_distribution<double> u(-r, r);
  std::vector<Point2> out;
  while (static_cast<int>(out.size()) < n) {
    const Point2 d{u(rng), u(rng)};
    if (norm(d) <= r) out.push_back(c + d);
  }
  return out;
}

Feature point_feature(Point2 p, Properties props, std::optional<std::string> id = std::nullopt) {
  return {std::move(id), p, std::move(props)};
}

double convex_hull_area(const std::vector<Point2>& pts) { return detail::convex_hull(pts).area(); }

}  // namespace

TEST(ClusterPoints, TwoBlobsAndEmpty) {
  std::mt19937 rng(1);
  auto pts = blob(rng, {0, 0}, 0.4, 60);
  const auto second = blob(rng, {5, 0}, 0.4, 60);
  pts.insert(pts.end(), second.begin(), second.end());
  EXPECT_EQ(cluster_points(cloud_of(pts), ClusterParams{}).size(), 2u);
  EXPECT_TRUE(cluster_points(PointCloud{}, ClusterParams{}).empty());
}

TEST(ClusterPoints, MatchesUnionFindOracle) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0, 20);
  std::vector<Point2> pts;
  for (int i = 0; i < 2000; ++i) pts.push_back({u(rng), u(rng)});
  ClusterParams p;
  p.eps = 0.35;
  p.min_points = 4;
  EXPECT_EQ(cluster_points(cloud_of(pts), p), oracle::brute_clusters(pts, p.eps, p.min_points));
}

TEST(ClusterPoints, RejectsBadParams) {
  ClusterParams p;
  p.eps = -1;
  EXPECT_THROW(cluster_points(PointCloud{}, p), ValidationError);
  p = {};
  p.min_points = 2;
  EXPECT_THROW(cluster_points(PointCloud{}, p), ValidationError);
}

TEST(FootprintOfCluster, SquareCorners) {
  const auto fp = footprint_of_cluster({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, 5.0);
  EXPECT_NEAR(fp.area(), 1.0, 1e-12);
  EXPECT_EQ(fp.exterior().size(), 4u);
}

TEST(FootprintOfCluster, DiskAreaNearPi) {
  std::mt19937 rng(3);
  std::vector<Point2> pts = blob(rng, {10, 10}, 1.0, 3000);
  for (int k = 0; k < 200; ++k) pts.push_back({10 + std::cos(k * M_PI / 100), 10 + std::sin(k * M_PI / 100)});
  const auto fp = footprint_of_cluster(pts, 0.5);
  EXPECT_NEAR(fp.area(), M_PI, 0.05 * M_PI);
  for (const auto p : pts) ASSERT_TRUE(point_in_polygon(p, fp));
}

TEST(FootprintOfCluster, LShapeBelowConvexHull) {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<Point2> pts;
  // L = [0,3]x[0,1] ∪ [0,1]x[1,3], area 5.
  while (pts.size() < 4000) {
    const Point2 p{3 * u(rng), 3 * u(rng)};
    if (p.y <= 1 || p.x <= 1) pts.push_back(p);
  }
  const auto fp = footprint_of_cluster(pts, 0.2);
  EXPECT_NEAR(fp.area(), 5.0, 0.5);
  EXPECT_LT(fp.area(), convex_hull_area(pts));
  for (const auto p : pts) ASSERT_TRUE(point_in_polygon(p, fp));
}

TEST(FootprintOfCluster, CollinearBecomesBufferedLine) {
  const auto fp = footprint_of_cluster({{0, 0}, {1, 1}, {2, 2}, {3, 3}}, 0.5);
  const double len = 3 * std::sqrt(2.0) + 0.1;
  EXPECT_NEAR(fp.area(), len * 0.1, 1e-9);
  EXPECT_TRUE(point_in_polygon({1.5, 1.5}, fp));
}

TEST(RegistryFootprints, TreeSixteenGon) {
  FeatureCollection trees;
  trees.features.push_back(point_feature({0, 0}, {{"crown_radius_m", 1.0}}));
  const auto fps = registry_footprints(trees, {}, {});
  ASSERT_EQ(fps.size(), 1u);
  EXPECT_EQ(fps[0].source, ObstacleSource::kTree);
  EXPECT_EQ(fps[0].footprint.exterior().size(), 16u);
  EXPECT_NEAR(fps[0].footprint.area(), M_PI, 0.02 * M_PI);
  EXPECT_TRUE(registry_footprints({}, {}, {}).empty());
}

TEST(RegistryFootprints, MissingRadiusNamesFeature) {
  FeatureCollection containers;
  containers.features.push_back(point_feature({0, 0}, {}, "bin-7"));
  try {
    registry_footprints({}, containers, {});
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("bin-7"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("base_radius_m"), std::string::npos) << e.what();
  }
}

TEST(RegistryFootprints, TerracePassesThrough) {
  const Polygon t({{0.1, 0.2}, {3.3, 0.2}, {3.3, 1.7}, {0.1, 1.7}});
  FeatureCollection terraces;
  terraces.features.push_back({std::nullopt, t, {}});
  const auto fps = registry_footprints({}, {}, terraces);
  ASSERT_EQ(fps.size(), 1u);
  EXPECT_EQ(fps[0].footprint, t);
  EXPECT_EQ(fps[0].source, ObstacleSource::kTerrace);
}

TEST(BuildObstacleSet, Composition) {
  FeatureCollection trees;
  trees.features.push_back(point_feature({4, 4}, {{"crown_radius_m", 0.75}}));
  const auto only_tree = build_obstacle_set(PointCloud{}, trees, {}, {}, ClusterParams{});
  ASSERT_EQ(only_tree.size(), 1u);
  EXPECT_EQ(only_tree[0].source, ObstacleSource::kTree);

  std::vector<Point2> box;
  for (int i = 0; i <= 20; ++i)
    for (int j = 0; j <= 20; ++j) box.push_back({1 + i * 0.05, 1 + j * 0.05});
  const auto set = build_obstacle_set(cloud_of(box), trees, {}, {}, ClusterParams{});
  ASSERT_EQ(set.size(), 2u);
  EXPECT_EQ(set[0].source, ObstacleSource::kDetected);
  EXPECT_NEAR(set[0].footprint.area(), 1.0, 1e-9);
}

TEST(BuildObstacleSet, TinyFootprintDropped) {
  std::vector<Point2> speck;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) speck.push_back({i * 0.0235, j * 0.0235});  // ~0.005 m²
  ClusterParams p;
  EXPECT_TRUE(build_obstacle_set(cloud_of(speck), {}, {}, {}, p).empty());
  p.min_footprint_area = 0.001;
  EXPECT_EQ(build_obstacle_set(cloud_of(speck), {}, {}, {}, p).size(), 1u);
}

TEST(BuildObstacleSet, DeterministicCentroidOrder) {
  std::mt19937 rng(12);
  std::vector<Point2> pts;
  for (Point2 c : {Point2{5, 1}, Point2{1, 5}, Point2{3, 3}}) {
    const auto b = blob(rng, c, 0.3, 40);
    pts.insert(pts.end(), b.begin(), b.end());
  }
  const auto a = build_obstacle_set(cloud_of(pts), {}, {}, {}, ClusterParams{});
  ASSERT_EQ(a.size(), 3u);
  EXPECT_LT(a[0].footprint.bbox().min_x, a[1].footprint.bbox().min_x);
  EXPECT_LT(a[1].footprint.bbox().min_x, a[2].footprint.bbox().min_x);
  const auto b = build_obstacle_set(cloud_of(pts), {}, {}, {}, ClusterParams{});
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(a[i].footprint, b[i].footprint);
}
