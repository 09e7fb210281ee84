#pragma once

// Polygon boolean operations backed by Boost.Geometry.

#include <string>
#include <vector>

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/multi_polygon.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>

#include "sidewalk/error.hpp"
#include "sidewalk/geom.hpp"

namespace sidewalk {

namespace detail::bool_ops {

namespace bg = boost::geometry;
using BgPoint = bg::model::d2::point_xy<double>;
using BgPolygon = bg::model::polygon<BgPoint, /*ClockWise=*/false, /*Closed=*/true>;
using BgMultiPolygon = bg::model::multi_polygon<BgPolygon>;

inline void append_ring(const Ring& ring, BgPolygon::ring_type& out) {
  for (const auto& p : ring) out.emplace_back(p.x, p.y);
  out.emplace_back(ring.front().x, ring.front().y);
}

inline BgPolygon to_bg(const Polygon& poly) {
  BgPolygon out;
  append_ring(poly.exterior(), out.outer());
  for (const auto& h : poly.holes()) {
    out.inners().emplace_back();
    append_ring(h, out.inners().back());
  }
  return out;
}

inline BgMultiPolygon to_bg(const MultiPolygon& mp) {
  BgMultiPolygon out;
  for (const auto& p : mp.parts) out.push_back(to_bg(p));
  return out;
}

inline std::vector<Point2> from_bg(const BgPolygon::ring_type& ring) {
  std::vector<Point2> out;
  out.reserve(ring.size());
  for (const auto& p : ring) out.push_back({p.x(), p.y()});
  return out;
}

/// Converts a Boost result, dropping sub-tolerance parts and holes. Invalid
/// rings surface as TopologyError carrying the ring index within its part.
inline MultiPolygon from_bg(const BgMultiPolygon& mp) {
  MultiPolygon out;
  for (std::size_t k = 0; k < mp.size(); ++k) {
    const auto& part = mp[k];
    if (bg::area(part) <= kAreaTolerance) continue;
    if (std::abs(bg::area(part.outer())) <= kAreaTolerance) continue;
    std::vector<std::vector<Point2>> holes;
    for (const auto& inner : part.inners()) {
      if (std::abs(bg::area(inner)) > kAreaTolerance) holes.push_back(from_bg(inner));
    }
    try {
      out.parts.emplace_back(from_bg(part.outer()), std::move(holes));
    } catch (const ValidationError& e) {
      const std::string msg = e.what();
      std::size_t ring = 0;
      if (msg.rfind("ring ", 0) == 0) ring = std::stoul(msg.substr(5));
      throw TopologyError("boolean result part " + std::to_string(k) + ": " + msg, ring);
    }
  }
  return out;
}

}  // namespace detail::bool_ops

/// Set difference a \ b. Parts of `b` are subtracted one at a time, so
/// overlapping subtrahends are tolerated.
inline MultiPolygon polygon_difference(const Polygon& a, const MultiPolygon& b) {
  namespace bo = detail::bool_ops;
  bo::BgMultiPolygon current;
  current.push_back(bo::to_bg(a));
  bool touched = false;
  for (const auto& part : b.parts) {
    if (!part.bbox().intersects(a.bbox())) continue;
    bo::BgMultiPolygon next;
    boost::geometry::difference(current, bo::to_bg(part), next);
    current = std::move(next);
    touched = true;
  }
  if (!touched) return MultiPolygon{{a}};
  return bo::from_bg(current);
}

inline MultiPolygon polygon_intersection(const Polygon& a, const Polygon& b) {
  namespace bo = detail::bool_ops;
  if (!a.bbox().intersects(b.bbox())) return {};
  bo::BgMultiPolygon out;
  boost::geometry::intersection(bo::to_bg(a), bo::to_bg(b), out);
  return bo::from_bg(out);
}

/// Union of possibly overlapping polygons.
inline MultiPolygon polygon_union(const std::vector<Polygon>& polys) {
  namespace bo = detail::bool_ops;
  bo::BgMultiPolygon acc;
  for (const auto& p : polys) {
    bo::BgMultiPolygon next;
    boost::geometry::union_(acc, bo::to_bg(p), next);
    acc = std::move(next);
  }
  return bo::from_bg(acc);
}

}  // namespace sidewalk
