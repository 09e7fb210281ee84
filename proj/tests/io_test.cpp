#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "sidewalk/io.hpp"
#include "support/temp_dir.hpp"

using namespace sidewalk;
using testing_support::TempDir;

namespace {

void write(const std::filesystem::path& p, const std::string& s) {
  std::ofstream(p, std::ios::binary) << s;
}

}  // namespace

TEST(ReadFeatures, UnitSquarePolygon) {
  TempDir dir;
  write(dir / "a.geojson", R"({"type":"FeatureCollection","features":[
    {"type":"Feature","geometry":{"type":"Polygon","coordinates":[[[0,0],[1,0],[1,1],[0,1],[0,0]]]},
     "properties":{"name":"sq"}}]})");
  const auto fc = read_features(dir / "a.geojson");
  ASSERT_EQ(fc.features.size(), 1u);
  EXPECT_DOUBLE_EQ(std::get<Polygon>(fc.features[0].geometry).area(), 1.0);
  EXPECT_EQ(string_property(fc.features[0].properties, "name"), "sq");
}

TEST(ReadFeatures, EmptyCollection) {
  EXPECT_TRUE(parse_features(R"({"type":"FeatureCollection","features":[]})").features.empty());
}

TEST(ReadFeatures, SelfIntersectingRingNamesFeature) {
  const char* doc = R"({"type":"FeatureCollection","features":[
    {"type":"Feature","geometry":{"type":"Point","coordinates":[0,0]},"properties":{}},
    {"type":"Feature","geometry":{"type":"Polygon","coordinates":[[[0,0],[1,1],[1,0],[0,1],[0,0]]]},"properties":{}}]})";
  try {
    parse_features(doc);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("feature 1"), std::string::npos) << e.what();
  }
}

TEST(ReadFeatures, MalformedJsonReportsByteOffset) {
  try {
    parse_features(R"({"type":"FeatureCollection","features":[}])");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.byte_offset(), 41u);  // 1-based position of the stray `}`
  }
}

TEST(ReadFeatures, NestedPropertyRejected) {
  EXPECT_THROW(parse_features(R"({"type":"FeatureCollection","features":[
    {"type":"Feature","geometry":{"type":"Point","coordinates":[0,0]},"properties":{"a":{"b":1}}}]})"),
               ValidationError);
}

TEST(WriteFeatures, RoundTripPolygonWithHoleAndProperties) {
  TempDir dir;
  FeatureCollection fc;
  Feature f{"sw-1",
            Polygon({{0.1, 0.2}, {10.123456789012345, 0}, {10, 10}, {0, 10}}, {{{4, 4}, {6, 4}, {6, 6}, {4, 6}}}),
            {{"category", std::string("0.9-1.8")}, {"n", std::int64_t{3}}, {"w", 1.25}, {"ok", true}, {"x", nullptr}}};
  fc.features.push_back(f);
  fc.features.push_back({std::nullopt, Polyline({{0, 0}, {1e-7, 3.3333333333333335}}), {}});
  write_features(fc, dir / "out.geojson");
  const auto back = read_features(dir / "out.geojson");
  ASSERT_EQ(back.features.size(), 2u);
  EXPECT_EQ(back.features[0].id, "sw-1");
  EXPECT_EQ(std::get<Polygon>(back.features[0].geometry), std::get<Polygon>(f.geometry));
  EXPECT_EQ(back.features[0].properties, f.properties);
  EXPECT_EQ(std::get<Polyline>(back.features[1].geometry), std::get<Polyline>(fc.features[1].geometry));
  EXPECT_EQ(to_geojson(back), to_geojson(fc));
}

TEST(WriteFeatures, EmptyCollectionIsValidGeoJson) {
  const auto text = to_geojson(FeatureCollection{});
  EXPECT_TRUE(parse_features(text).features.empty());
}

TEST(WriteFeatures, UnwritablePathIsIoError) {
  EXPECT_THROW(write_features(FeatureCollection{}, "/nonexistent-dir/x.geojson"), IoError);
}

TEST(PointCloudIo, TextFileWithComments) {
  TempDir dir;
  write(dir / "epoch_a.xyz", "# header\n1 2 3\n\n4.5 5 6 # trailing\n7\t8\t9\n");
  const auto c = read_point_cloud(dir / "epoch_a.xyz");
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c.epoch_label, "epoch_a");
  EXPECT_EQ(c.points[1], (Point3{4.5, 5, 6}));
}

TEST(PointCloudIo, TextRejectsNonFiniteAndBadFields) {
  TempDir dir;
  write(dir / "a.xyz", "1 2 nan\n");
  EXPECT_THROW(read_point_cloud(dir / "a.xyz"), ValidationError);
  write(dir / "b.xyz", "1 2\n");
  EXPECT_THROW(read_point_cloud(dir / "b.xyz"), IoError);
}

TEST(PointCloudIo, BinaryRoundTripIsBitIdentical) {
  TempDir dir;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e5, 1e5);
  PointCloud c;
  for (int i = 0; i < 10000; ++i) c.points.push_back({u(rng), u(rng), u(rng)});
  write_point_cloud_binary(c, dir / "b.swpc");
  const auto back = read_point_cloud(dir / "b.swpc");
  ASSERT_EQ(back.size(), c.size());
  EXPECT_EQ(std::memcmp(back.points.data(), c.points.data(), c.size() * sizeof(Point3)), 0);
}

TEST(PointCloudIo, TruncatedBinaryNamesMissingRecord) {
  TempDir dir;
  PointCloud c;
  for (int i = 0; i < 5; ++i) c.points.push_back({1.0 * i, 0, 0});
  write_point_cloud_binary(c, dir / "t.swpc");
  std::filesystem::resize_file(dir / "t.swpc", 16 + 4 * 24);
  try {
    read_point_cloud(dir / "t.swpc");
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("record 5"), std::string::npos) << e.what();
  }
}

TEST(ElevationGridIo, AllZeros) {
  const auto g = parse_elevation_grid("ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\nNODATA_value -9999\n0 0\n0 0\n");
  for (double x : {0.0, 0.3, 1.0, 1.7, 2.0})
    for (double y : {0.0, 0.5, 1.2, 2.0}) EXPECT_EQ(g.elevation_at({x, y}), 0.0);
  EXPECT_FALSE(g.elevation_at({2.5, 1.0}).has_value());
}

TEST(ElevationGridIo, NodataCellIsUnknown) {
  const auto g = parse_elevation_grid("ncols 3\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\nNODATA_value -9999\n1 2 -9999\n4 5 6\n");
  EXPECT_FALSE(g.elevation_at({2.5, 1.5}).has_value());  // the NODATA cell centre
  EXPECT_FALSE(g.elevation_at({2.0, 1.0}).has_value());  // neighbour of NODATA
  EXPECT_EQ(g.elevation_at({0.5, 0.5}), 4.0);
}

TEST(ElevationGridIo, BilinearExactAtCentresAndLinearBetween) {
  std::vector<double> vals;
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(-3, 30);
  for (int i = 0; i < 12; ++i) vals.push_back(u(rng));
  const ElevationGrid g({120000.0, 480000.0}, 0.5, 4, 3, vals);
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 4; ++c) EXPECT_EQ(g.elevation_at(g.cell_center(c, r)), vals[r * 4 + c]);
  const Point2 a = g.cell_center(1, 2), b = g.cell_center(2, 2);
  EXPECT_NEAR(*g.elevation_at((a + b) * 0.5), 0.5 * (vals[9] + vals[10]), 1e-12);
}

TEST(ElevationGridIo, ValueCountMismatchReportsCounts) {
  try {
    parse_elevation_grid("ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n0 0 0\n");
    FAIL();
  } catch (const IoError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("= 4 values"), std::string::npos) << msg;
    EXPECT_NE(msg.find("found 3"), std::string::npos) << msg;
  }
}

TEST(ElevationGridIo, WriteReadRoundTrip) {
  TempDir dir;
  const ElevationGrid g({10, 20}, 0.25, 2, 2, {1.5, -9999, 3.25, 4});
  write_elevation_grid(g, dir / "g.asc");
  const auto back = read_elevation_grid(dir / "g.asc");
  EXPECT_EQ(back.values(), g.values());
  EXPECT_EQ(back.origin(), g.origin());
}
