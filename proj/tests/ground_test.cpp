#include <gtest/gtest.h>

#include <random>

#include "sidewalk/ground.hpp"
#include "support/oracles.hpp"

using namespace sidewalk;

namespace {

ElevationGrid flat_grid(double z, double size = 10.0) {
  const std::size_t n = static_cast<std::size_t>(size);
  return ElevationGrid({0, 0}, 1.0, n, n, std::vector<double>(n * n, z));
}

PointCloud cloud_of(std::vector<Point3> pts) {
  PointCloud c;
  c.points = std::move(pts);
  return c;
}

}  // namespace

TEST(ClipToPolygon, KeepsInsidePoints) {
  const auto c = clip_to_polygon(cloud_of({{0.5, 0.5, 0}, {2, 2, 0}, {0.1, 0.9, 3}, {-1, 0.5, 0}}),
                                 make_rectangle(0, 0, 1, 1));
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.points[1], (Point3{0.1, 0.9, 3}));
  EXPECT_TRUE(clip_to_polygon(PointCloud{}, make_rectangle(0, 0, 1, 1)).empty());
}

TEST(ClipToPolygon, MatchesRayCastingOnLShape) {
  const std::vector<Point2> l{{0, 0}, {6, 0}, {6, 2}, {2, 2}, {2, 6}, {0, 6}};
  const Polygon poly(l);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1, 7);
  PointCloud c;
  for (int i = 0; i < 10000; ++i) c.points.push_back({u(rng), u(rng), u(rng)});
  const auto clipped = clip_to_polygon(c, poly);
  std::vector<Point3> expected;
  for (const auto& p : c.points) {
    if (oracle::ray_cast(p.xy(), l)) expected.push_back(p);
  }
  EXPECT_EQ(clipped.points, expected);
  EXPECT_EQ(clip_to_polygon(clipped, poly).points, clipped.points);
}

TEST(ExtractBand, Labels) {
  const auto r = extract_band(cloud_of({{5, 5, 1.0}, {5, 5, 2.5}, {5, 5, 0.02}, {5, 5, -0.3}, {50, 5, 0.5}}),
                              flat_grid(0.0), BandParams{});
  ASSERT_EQ(r.obstacle_points.size(), 1u);
  EXPECT_EQ(r.obstacle_points.points[0].z, 1.0);
  ASSERT_EQ(r.ground_points.size(), 1u);
  EXPECT_EQ(r.ground_points.points[0].z, 0.02);
  ASSERT_EQ(r.unknown_points.size(), 1u);
  EXPECT_EQ(r.discarded, 2u);
}

TEST(ExtractBand, PartitionIsExhaustiveAndShiftInvariant) {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> xy(-2, 12), z(-1, 3);
  PointCloud c;
  for (int i = 0; i < 5000; ++i) c.points.push_back({xy(rng), xy(rng), z(rng)});
  const auto r = extract_band(c, flat_grid(0.0), BandParams{});
  EXPECT_EQ(r.obstacle_points.size() + r.ground_points.size() + r.unknown_points.size() + r.discarded, c.size());

  // Power-of-two shift keeps every height bit-identical.
  PointCloud shifted = c;
  for (auto& p : shifted.points) p.z += 64.0;
  const auto s = extract_band(shifted, flat_grid(64.0), BandParams{});
  EXPECT_EQ(s.obstacle_points.size(), r.obstacle_points.size());
  EXPECT_EQ(s.ground_points.size(), r.ground_points.size());
  EXPECT_EQ(s.discarded, r.discarded);
}

TEST(ExtractBand, RejectsBadParams) {
  EXPECT_THROW(extract_band(PointCloud{}, flat_grid(0), BandParams{0.0, 2.0}), ValidationError);
  EXPECT_THROW(extract_band(PointCloud{}, flat_grid(0), BandParams{2.0, 1.0}), ValidationError);
}
