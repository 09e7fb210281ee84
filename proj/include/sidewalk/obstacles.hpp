#pragma once

// Obstacle footprints: clustering of static points, concave hulls, and
// registry objects (trees, container bases, terraces).

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "sidewalk/boolean.hpp"
#include "sidewalk/delaunay.hpp"
#include "sidewalk/error.hpp"
#include "sidewalk/geom.hpp"
#include "sidewalk/io.hpp"
#include "sidewalk/spatial.hpp"

namespace sidewalk {

enum class ObstacleSource { kDetected, kTree, kContainer, kTerrace };

inline const char* source_name(ObstacleSource s) {
  switch (s) {
    case ObstacleSource::kDetected: return "detected";
    case ObstacleSource::kTree: return "tree";
    case ObstacleSource::kContainer: return "container";
    case ObstacleSource::kTerrace: return "terrace";
  }
  return "detected";
}

inline ObstacleSource parse_source(const std::string& s) {
  if (s == "detected") return ObstacleSource::kDetected;
  if (s == "tree") return ObstacleSource::kTree;
  if (s == "container") return ObstacleSource::kContainer;
  if (s == "terrace") return ObstacleSource::kTerrace;
  throw ValidationError("unknown obstacle source '" + s + "'");
}

struct ObstacleFootprint {
  Polygon footprint;
  ObstacleSource source = ObstacleSource::kDetected;
};

struct ClusterParams {
  double eps = 0.3;
  std::size_t min_points = 10;
  double hull_alpha = 0.5;
  double min_footprint_area = 0.01;

  void validate() const {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw ValidationError("cluster: eps must be positive");
    if (min_points < 3) throw ValidationError("cluster: min_points must be at least 3");
    if (!(hull_alpha > 0.0) || !std::isfinite(hull_alpha)) throw ValidationError("cluster: hull_alpha must be positive");
    if (!(min_footprint_area >= 0.0)) throw ValidationError("cluster: min_footprint_area must be non-negative");
  }
};

/// Half-width of the footprint given to collinear clusters.
inline constexpr double kLineFootprintHalfWidth = 0.05;

/// Connected components of the eps-neighbourhood graph on (x, y) with at least
/// `min_points` members. Each cluster lists point indices in ascending order;
/// clusters are ordered by their first index.
inline std::vector<std::vector<std::size_t>> cluster_points(const PointCloud& points, const ClusterParams& params) {
  params.validate();
  std::vector<Point2> xy;
  xy.reserve(points.size());
  for (const auto& p : points.points) xy.push_back(p.xy());
  const GridIndex index(xy, params.eps);

  std::vector<std::size_t> parent(xy.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < xy.size(); ++i) {
    index.for_each_within(xy[i], params.eps, [&](std::uint32_t j) {
      if (j <= i) return;
      const std::size_t a = find(i), b = find(j);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    });
  }
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < xy.size(); ++i) groups[find(i)].push_back(i);
  std::vector<std::vector<std::size_t>> out;
  for (auto& [root, members] : groups) {
    if (members.size() >= params.min_points) out.push_back(std::move(members));
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace detail {

inline Polygon buffered_segment(Point2 a, Point2 b, double half_width) {
  Point2 u{1.0, 0.0};
  const double len = distance(a, b);
  if (len > 0.0) u = (b - a) * (1.0 / len);
  const Point2 n{-u.y, u.x};
  const Point2 s = a - u * half_width, e = b + u * half_width;
  return Polygon({s - n * half_width, e - n * half_width, e + n * half_width, s + n * half_width});
}

/// Rectangle hugging the extreme points along the principal direction.
inline Polygon line_footprint(const std::vector<Point2>& pts) {
  Point2 a = pts.front(), b = pts.front();
  double best = -1.0;
  for (const Point2 p : pts) {
    for (const Point2 q : pts) {
      const double d = squared_distance(p, q);
      if (d > best) {
        best = d;
        a = p;
        b = q;
      }
    }
  }
  if (b < a) std::swap(a, b);
  return buffered_segment(a, b, kLineFootprintHalfWidth);
}

inline Polygon convex_hull(const std::vector<Point2>& pts) {
  namespace bg = boost::geometry;
  bg::model::multi_point<bool_ops::BgPoint> mp;
  for (const Point2 p : pts) mp.emplace_back(p.x, p.y);
  bool_ops::BgPolygon hull;
  bg::convex_hull(mp, hull);
  return Polygon(bool_ops::from_bg(hull.outer()));
}

/// Single-loop alpha shape, or nullopt when the kept triangles do not form
/// one simple region covering every point.
inline std::optional<Polygon> alpha_shape(const DelaunayTriangulation& dt, const std::vector<Point2>& pts,
                                          double alpha) {
  const auto& tris = dt.triangles();
  std::vector<char> kept(tris.size(), 0);
  for (std::size_t t = 0; t < tris.size(); ++t) kept[t] = dt.is_real(tris[t]) && dt.circumradius(tris[t]) <= alpha;

  std::map<std::uint32_t, std::uint32_t> next;
  std::size_t edges = 0;
  for (std::size_t t = 0; t < tris.size(); ++t) {
    if (!kept[t]) continue;
    for (unsigned i = 0; i < 3; ++i) {
      const auto n = tris[t].adj[i];
      if (n != DelaunayTriangulation::kNone && kept[n]) continue;
      const auto u = tris[t].v[(i + 1) % 3], v = tris[t].v[(i + 2) % 3];
      if (!next.emplace(u, v).second) return std::nullopt;  // pinch vertex
      ++edges;
    }
  }
  if (edges < 3) return std::nullopt;
  std::vector<Point2> ring;
  auto cur = next.begin()->first;
  do {
    ring.push_back(dt.points()[cur]);
    cur = next.at(cur);
  } while (cur != next.begin()->first && ring.size() <= edges);
  if (ring.size() != edges) return std::nullopt;
  try {
    Polygon poly(std::move(ring));
    for (const Point2 p : pts) {
      if (!point_in_polygon(p, poly)) return std::nullopt;
    }
    return poly;
  } catch (const ValidationError&) {
    return std::nullopt;
  }
}

}  // namespace detail

/// Concave hull at scale `hull_alpha` (triangles with circumradius ≤ alpha).
/// Alpha doubles until a single simple region covers every point, falling back
/// to the convex hull. Collinear clusters get a buffered segment.
inline Polygon footprint_of_cluster(std::vector<Point2> cluster, double hull_alpha) {
  if (!(hull_alpha > 0.0)) throw ValidationError("footprint: hull_alpha must be positive");
  if (cluster.empty()) throw ValidationError("footprint: empty cluster");
  std::sort(cluster.begin(), cluster.end());
  cluster.erase(std::unique(cluster.begin(), cluster.end()), cluster.end());
  const bool collinear = std::all_of(cluster.begin(), cluster.end(), [&](Point2 p) {
    return predicates::orient(cluster.front(), cluster.back(), p) == 0;
  });
  if (cluster.size() < 3 || collinear) return detail::line_footprint(cluster);

  const DelaunayTriangulation dt(cluster);
  double alpha = hull_alpha;
  for (int attempt = 0; attempt <= 8; ++attempt, alpha *= 2.0) {
    if (auto poly = detail::alpha_shape(dt, cluster, alpha)) return *std::move(poly);
  }
  try {
    return detail::convex_hull(cluster);
  } catch (const ValidationError&) {
    return detail::line_footprint(cluster);
  }
}

/// Point features with a radius property become circumscribed 16-gons;
/// terrace polygons pass through unchanged.
inline std::vector<ObstacleFootprint> registry_footprints(const FeatureCollection& trees,
                                                          const FeatureCollection& containers,
                                                          const FeatureCollection& terraces) {
  std::vector<ObstacleFootprint> out;
  auto circles = [&](const FeatureCollection& fc, const char* layer, const char* key, ObstacleSource src) {
    for (std::size_t i = 0; i < fc.features.size(); ++i) {
      const Feature& f = fc.features[i];
      const std::string name = std::string(layer) + " feature " + (f.id ? "'" + *f.id + "'" : std::to_string(i));
      const auto* p = std::get_if<Point2>(&f.geometry);
      if (!p) throw ValidationError(name + ": expected Point geometry");
      const auto r = numeric_property(f.properties, key);
      if (!r) throw ValidationError(name + ": missing " + key);
      if (!(*r > 0.0) || !std::isfinite(*r)) throw ValidationError(name + ": " + key + " must be positive");
      out.push_back({make_circumscribed_ngon(*p, *r, 16), src});
    }
  };
  circles(trees, "trees", "crown_radius_m", ObstacleSource::kTree);
  circles(containers, "containers", "base_radius_m", ObstacleSource::kContainer);
  for (std::size_t i = 0; i < terraces.features.size(); ++i) {
    const Feature& f = terraces.features[i];
    if (const auto* p = std::get_if<Polygon>(&f.geometry)) {
      out.push_back({*p, ObstacleSource::kTerrace});
    } else if (const auto* mp = std::get_if<MultiPolygon>(&f.geometry)) {
      for (const auto& part : mp->parts) out.push_back({part, ObstacleSource::kTerrace});
    } else {
      throw ValidationError("terraces feature " + (f.id ? "'" + *f.id + "'" : std::to_string(i)) +
                            ": expected Polygon geometry");
    }
  }
  return out;
}

/// Footprints of all clusters with area ≥ min_footprint_area, ordered by
/// cluster centroid.
inline std::vector<ObstacleFootprint> detect_footprints(const PointCloud& static_points, const ClusterParams& params) {
  const auto clusters = cluster_points(static_points, params);
  std::vector<std::pair<Point2, Polygon>> found;
  for (const auto& members : clusters) {
    std::vector<Point2> pts;
    pts.reserve(members.size());
    Point2 sum;
    for (std::size_t i : members) {
      pts.push_back(static_points.points[i].xy());
      sum = sum + pts.back();
    }
    Polygon fp = footprint_of_cluster(std::move(pts), params.hull_alpha);
    if (fp.area() < params.min_footprint_area) continue;
    found.emplace_back(sum * (1.0 / static_cast<double>(members.size())), std::move(fp));
  }
  std::stable_sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<ObstacleFootprint> out;
  for (auto& [c, fp] : found) out.push_back({std::move(fp), ObstacleSource::kDetected});
  return out;
}

/// Detected footprints followed by registry footprints; overlaps are kept.
inline std::vector<ObstacleFootprint> build_obstacle_set(const PointCloud& static_points,
                                                         const FeatureCollection& trees,
                                                         const FeatureCollection& containers,
                                                         const FeatureCollection& terraces,
                                                         const ClusterParams& params) {
  auto out = detect_footprints(static_points, params);
  for (auto& r : registry_footprints(trees, containers, terraces)) out.push_back(std::move(r));
  return out;
}

}  // namespace sidewalk
