#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sidewalk/changedet.hpp"
#include "sidewalk/ground.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace sidewalk;

namespace {

PointCloud plane(std::uint32_t seed, double z = 0.0) {
  std::mt19937 rng(seed);
  PointCloud c;
  synthetic::sample_plane(rng, 0, 0, 4, 4, z, 0.1, c.points);
  return c;
}

}  // namespace

TEST(SelectCorePoints, Basics) {
  PointCloud one;
  one.points = {{1.1, 2.2, 3.3}};
  EXPECT_EQ(select_core_points(one, 0.5), one.points);

  PointCloud cube;
  for (int i = 0; i < 8; ++i) cube.points.push_back({(i & 1) * 1.0 + 0.1, (i >> 1 & 1) * 1.0 + 0.1, (i >> 2) * 1.0 + 0.1});
  EXPECT_EQ(select_core_points(cube, 0.5).size(), 8u);
  EXPECT_THROW(select_core_points(cube, 0.0), ValidationError);
}

TEST(SelectCorePoints, CountMatchesOccupancyAndCoversInput) {
  std::mt19937 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  PointCloud c;
  for (int i = 0; i < 10000; ++i) {
    const double cx = (i % 4) * 3.0;
    c.points.push_back({cx + g(rng), g(rng), 0.5 * g(rng)});
  }
  const auto cores = select_core_points(c, 0.5);
  EXPECT_EQ(cores.size(), oracle::occupied_cells(c.points, 0.5));
  for (const auto& p : c.points) {
    double best = 1e9;
    for (const auto& q : cores) best = std::min(best, std::hypot(p.x - q.x, p.y - q.y, p.z - q.z));
    ASSERT_LE(best, 0.5 * std::sqrt(3.0) + 1e-12);
  }
}

TEST(EstimateNormal, PlanesAndConvention) {
  const auto h = plane(1);
  const auto n = estimate_normal({2, 2, 0}, h, 0.5);
  ASSERT_TRUE(n);
  EXPECT_NEAR((*n)[2], 1.0, 1e-3);

  PointCloud v;
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) v.points.push_back({0.0, i * 0.05, j * 0.05});
  const auto nv = estimate_normal({0, 0.5, 0.5}, v, 0.3);
  ASSERT_TRUE(nv);
  EXPECT_NEAR((*nv)[0], 1.0, 1e-9);

  PointCloud sparse;
  sparse.points = {{0, 0, 0}, {0.1, 0, 0}};
  EXPECT_FALSE(estimate_normal({0, 0, 0}, sparse, 1.0));
}

TEST(EstimateNormal, TiltedNoisyPlaneWithinTwoDegrees) {
  const double tilt = 30.0 * M_PI / 180.0;
  const Vec3 truth{std::sin(tilt), 0.0, std::cos(tilt)};
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(-1, 1);
  std::normal_distribution<double> noise(0.0, 0.005);
  PointCloud c;
  for (int i = 0; i < 4000; ++i) {
    const double x = u(rng), y = u(rng);
    const double z = -std::tan(tilt) * x;
    const double e = noise(rng);
    c.points.push_back({x + e * truth[0], y, z + e * truth[2]});
  }
  const auto n = estimate_normal({0, 0, 0}, c, 0.5);
  ASSERT_TRUE(n);
  EXPECT_NEAR(std::sqrt(dot3(*n, *n)), 1.0, 1e-9);
  EXPECT_LT(std::acos(std::min(1.0, dot3(*n, truth))) * 180.0 / M_PI, 2.0);
}

TEST(M3C2Distance, IdentityAndShift) {
  M3C2Params p;
  const auto a = plane(3);
  const auto same = m3c2_distance({2, 2, 0}, {0, 0, 1}, a, a, p);
  EXPECT_EQ(same.distance, 0.0);
  EXPECT_EQ(same.status, CoreStatus::kStatic);
  EXPECT_GE(same.lod, p.registration_error);

  PointCloud b = a;
  for (auto& q : b.points) q.z += 0.5;
  const auto moved = m3c2_distance({2, 2, 0}, {0, 0, 1}, a, b, p);
  EXPECT_EQ(moved.status, CoreStatus::kChanged);
  EXPECT_NEAR(moved.distance, 0.5, 1e-9);
}

TEST(M3C2Distance, SwapNegatesAndTranslationInvariant) {
  M3C2Params p;
  const auto a = plane(3);
  auto b = plane(4, 0.03);
  for (const auto& core : select_core_points(a, 0.5)) {
    const auto ab = m3c2_distance(core, {0, 0, 1}, a, b, p);
    const auto ba = m3c2_distance(core, {0, 0, 1}, b, a, p);
    EXPECT_EQ(ab.distance, -ba.distance);
    EXPECT_EQ(ab.status, ba.status);
  }
  PointCloud ta = a, tb = b;
  for (auto& q : ta.points) q = {q.x + 8.0, q.y - 4.0, q.z + 2.0};
  for (auto& q : tb.points) q = {q.x + 8.0, q.y - 4.0, q.z + 2.0};
  for (const auto& core : select_core_points(a, 0.5)) {
    const auto r = m3c2_distance(core, {0, 0, 1}, a, b, p);
    const auto t = m3c2_distance({core.x + 8.0, core.y - 4.0, core.z + 2.0}, {0, 0, 1}, ta, tb, p);
    EXPECT_NEAR(r.distance, t.distance, 1e-9);
    EXPECT_EQ(r.status, t.status);
  }
}

TEST(M3C2Distance, PlaneBoxMatchesBruteForceCylinders) {
  const auto scene = synthetic::plane_box_scene(21, false);
  M3C2Params p;
  const auto results = compare_epochs(scene.a, scene.b, p);
  std::size_t box_top = 0, far_plane = 0;
  for (const auto& r : results) {
    const auto o = oracle::brute_cylinder(r.core, r.normal, scene.a.points, scene.b.points, p.cylinder_radius,
                                          p.cylinder_halfdepth);
    ASSERT_EQ(r.count_a, o.na);
    ASSERT_EQ(r.count_b, o.nb);
    if (o.na && o.nb) {
      ASSERT_NEAR(r.distance, o.distance, 1e-9);
    }
    if (r.core.z > 0.9) {
      ++box_top;
      EXPECT_EQ(r.status, CoreStatus::kChanged);
    }
    const double dx = std::max(std::abs(r.core.x - 5.0) - 0.5, 0.0), dy = std::max(std::abs(r.core.y - 5.0) - 0.5, 0.0);
    if (std::hypot(dx, dy) > p.cylinder_radius + 0.05 && r.core.x > 0.5 && r.core.x < 9.5 && r.core.y > 0.5 && r.core.y < 9.5) {
      ++far_plane;
      EXPECT_EQ(r.status, CoreStatus::kStatic);
    }
  }
  EXPECT_GT(box_top, 0u);
  EXPECT_GT(far_plane, 100u);
}

TEST(FilterStatic, IdenticalEpochsKeepEverything) {
  const auto a = plane(6, 0.5);
  EXPECT_EQ(filter_static(a, a, M3C2Params{}).points, a.points);
}

TEST(FilterStatic, EmptyEpochIsAnError) {
  try {
    filter_static(plane(1), PointCloud{}, M3C2Params{});
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_STREQ(e.what(), "change detection requires two epochs");
  }
}

TEST(FilterStatic, BenchKeptBicycleDropped) {
  std::mt19937 rng(31);
  PointCloud a, b;
  synthetic::sample_box(rng, 1.0, 1.0, 2.5, 1.5, 0.0, 0.5, 0.05, a.points);  // bench
  const std::size_t bench = a.size();
  synthetic::sample_box(rng, 4.0, 1.0, 5.8, 1.1, 0.0, 1.0, 0.05, a.points);  // bicycle
  synthetic::sample_box(rng, 1.0, 1.0, 2.5, 1.5, 0.0, 0.5, 0.05, b.points);
  const auto kept = filter_static(a, b, M3C2Params{});
  std::size_t kept_bench = 0, kept_bike = 0;
  for (const auto& q : kept.points) (q.x < 3.0 ? kept_bench : kept_bike)++;
  EXPECT_GE(kept_bench, bench * 95 / 100);
  EXPECT_EQ(kept_bike, 0u);
  for (const auto& q : kept.points) EXPECT_NE(std::find(a.points.begin(), a.points.end(), q), a.points.end());
}
