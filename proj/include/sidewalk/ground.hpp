#pragma once

// Height-band extraction over an elevation raster.

#include <cmath>

#include "sidewalk/error.hpp"
#include "sidewalk/geom.hpp"
#include "sidewalk/io.hpp"

namespace sidewalk {

struct BandParams {
  double ground_tolerance = 0.05;
  double max_height = 2.0;

  void validate() const {
    if (!(ground_tolerance > 0.0) || !(ground_tolerance < max_height) || !std::isfinite(max_height)) {
      throw ValidationError("band: require 0 < ground_tolerance < max_height");
    }
  }
};

inline PointCloud clip_to_polygon(const PointCloud& cloud, const Polygon& sidewalk) {
  PointCloud out;
  out.epoch_label = cloud.epoch_label;
  const BBox& box = sidewalk.bbox();
  for (const Point3& p : cloud.points) {
    if (box.contains(p.xy()) && point_in_polygon(p.xy(), sidewalk)) out.points.push_back(p);
  }
  return out;
}

struct BandResult {
  PointCloud obstacle_points;
  PointCloud ground_points;
  PointCloud unknown_points;
  std::size_t discarded = 0;
};

/// Splits by height above the grid: ground, obstacle band, or unknown where
/// the grid has no value. Points above the band or below ground are dropped.
inline BandResult extract_band(const PointCloud& cloud, const ElevationGrid& grid, const BandParams& params) {
  params.validate();
  BandResult r;
  r.obstacle_points.epoch_label = r.ground_points.epoch_label = r.unknown_points.epoch_label = cloud.epoch_label;
  for (const Point3& p : cloud.points) {
    const auto e = grid.elevation_at(p.xy());
    if (!e) {
      r.unknown_points.points.push_back(p);
      continue;
    }
    const double h = p.z - *e;
    if (h < -params.ground_tolerance || h > params.max_height) {
      ++r.discarded;
    } else if (h <= params.ground_tolerance) {
      r.ground_points.points.push_back(p);
    } else {
      r.obstacle_points.points.push_back(p);
    }
  }
  return r;
}

}  // namespace sidewalk
