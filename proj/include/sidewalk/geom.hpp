#pragma once

// Planar geometry kernel. Coordinates are meters in a projected grid.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sidewalk/error.hpp"
#include "sidewalk/predicates.hpp"

namespace sidewalk {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr bool operator==(const Point2&, const Point2&) = default;
  friend constexpr auto operator<=>(const Point2&, const Point2&) = default;
};

inline constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline constexpr Point2 operator*(Point2 a, double s) { return {a.x * s, a.y * s}; }
inline constexpr Point2 operator*(double s, Point2 a) { return {a.x * s, a.y * s}; }
inline constexpr double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline constexpr double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
inline constexpr double squared_distance(Point2 a, Point2 b) {
  return (a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y);
}
inline bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

/// Absolute area tolerance (m²) used by every validity check.
inline constexpr double kAreaTolerance = 1e-6;

struct BBox {
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = std::numeric_limits<double>::infinity();
  double max_x = -std::numeric_limits<double>::infinity();
  double max_y = -std::numeric_limits<double>::infinity();

  void expand(Point2 p) {
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }
  void expand(const BBox& b) {
    min_x = std::min(min_x, b.min_x);
    min_y = std::min(min_y, b.min_y);
    max_x = std::max(max_x, b.max_x);
    max_y = std::max(max_y, b.max_y);
  }
  bool empty() const { return min_x > max_x; }
  bool intersects(const BBox& o, double margin = 0.0) const {
    return !(o.min_x > max_x + margin || o.max_x < min_x - margin ||
             o.min_y > max_y + margin || o.max_y < min_y - margin);
  }
  bool contains(Point2 p, double margin = 0.0) const {
    return p.x >= min_x - margin && p.x <= max_x + margin && p.y >= min_y - margin &&
           p.y <= max_y + margin;
  }
};

/// Closed ring stored without the repeated closing vertex.
using Ring = std::vector<Point2>;

inline double signed_area(std::span<const Point2> ring) {
  double sum = 0.0;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = ring[i];
    const Point2 b = ring[(i + 1) % n];
    sum += (a.x - ring[0].x) * (b.y - ring[0].y) - (b.x - ring[0].x) * (a.y - ring[0].y);
  }
  return 0.5 * sum;
}

inline BBox bbox_of(std::span<const Point2> pts) {
  BBox b;
  for (const auto& p : pts) b.expand(p);
  return b;
}

// ---------------------------------------------------------------------------
// Segment primitives

inline Point2 closest_point_on_segment(Point2 p, Point2 a, Point2 b) {
  const Point2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return a;
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return a + ab * t;
}

inline double point_segment_distance(Point2 p, Point2 a, Point2 b) {
  return distance(p, closest_point_on_segment(p, a, b));
}

enum class SegmentContact { kNone, kTouch, kProper, kOverlap };

namespace detail {

inline bool within_box(Point2 a, Point2 b, Point2 p) {
  return p.x >= std::min(a.x, b.x) && p.x <= std::max(a.x, b.x) && p.y >= std::min(a.y, b.y) &&
         p.y <= std::max(a.y, b.y);
}

}  // namespace detail

/// Classifies how closed segments [p1,p2] and [q1,q2] meet.
inline SegmentContact classify_segments(Point2 p1, Point2 p2, Point2 q1, Point2 q2) {
  using predicates::orient;
  const int o1 = orient(p1, p2, q1);
  const int o2 = orient(p1, p2, q2);
  const int o3 = orient(q1, q2, p1);
  const int o4 = orient(q1, q2, p2);
  if (o1 == 0 && o2 == 0) {
    const bool use_x = std::abs(p2.x - p1.x) >= std::abs(p2.y - p1.y);
    auto coord = [use_x](Point2 p) { return use_x ? p.x : p.y; };
    const double lo = std::max(std::min(coord(p1), coord(p2)), std::min(coord(q1), coord(q2)));
    const double hi = std::min(std::max(coord(p1), coord(p2)), std::max(coord(q1), coord(q2)));
    if (hi > lo) return SegmentContact::kOverlap;
    if (hi == lo) return SegmentContact::kTouch;
    return SegmentContact::kNone;
  }
  if (o1 * o2 < 0 && o3 * o4 < 0) return SegmentContact::kProper;
  if ((o1 == 0 && detail::within_box(p1, p2, q1)) || (o2 == 0 && detail::within_box(p1, p2, q2)) ||
      (o3 == 0 && detail::within_box(q1, q2, p1)) || (o4 == 0 && detail::within_box(q1, q2, p2))) {
    return SegmentContact::kTouch;
  }
  return SegmentContact::kNone;
}

// ---------------------------------------------------------------------------
// Polyline

class Polyline {
 public:
  Polyline() = default;

  /// Throws ValidationError unless there are ≥2 finite vertices with distinct neighbours.
  explicit Polyline(std::vector<Point2> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.size() < 2) throw ValidationError("polyline needs at least 2 vertices");
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      if (!is_finite(vertices_[i])) {
        throw ValidationError("polyline vertex " + std::to_string(i) + " is not finite");
      }
      if (i > 0 && vertices_[i] == vertices_[i - 1]) {
        throw ValidationError("polyline vertices " + std::to_string(i - 1) + " and " +
                              std::to_string(i) + " coincide");
      }
    }
  }

  const std::vector<Point2>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  Point2 front() const { return vertices_.front(); }
  Point2 back() const { return vertices_.back(); }
  bool closed() const { return vertices_.size() > 2 && vertices_.front() == vertices_.back(); }

  double length() const {
    double len = 0.0;
    for (std::size_t i = 1; i < vertices_.size(); ++i) len += distance(vertices_[i - 1], vertices_[i]);
    return len;
  }

  friend bool operator==(const Polyline&, const Polyline&) = default;

 private:
  std::vector<Point2> vertices_;
};

inline double distance_to_polyline(Point2 p, const Polyline& line) {
  const auto& v = line.vertices();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < v.size(); ++i) best = std::min(best, point_segment_distance(p, v[i - 1], v[i]));
  return best;
}

/// Inserts evenly spaced points so no gap exceeds `interval`; keeps all vertices.
inline std::vector<Point2> densify_polyline(const Polyline& line, double interval) {
  if (!(interval > 0.0)) throw ValidationError("densify interval must be positive");
  const auto& v = line.vertices();
  std::vector<Point2> out{v.front()};
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double len = distance(v[i - 1], v[i]);
    const auto parts = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / interval - 1e-9)));
    for (std::size_t k = 1; k < parts; ++k) {
      const double t = static_cast<double>(k) / static_cast<double>(parts);
      out.push_back(v[i - 1] + (v[i] - v[i - 1]) * t);
    }
    out.push_back(v[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Polygon

namespace detail {

inline Ring normalize_ring(std::vector<Point2> pts, std::size_t ring_index) {
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!is_finite(pts[i])) {
      throw ValidationError("ring " + std::to_string(ring_index) + ": vertex " + std::to_string(i) +
                            " is not finite");
    }
  }
  Ring ring;
  ring.reserve(pts.size());
  for (const auto& p : pts) {
    if (ring.empty() || ring.back() != p) ring.push_back(p);
  }
  while (ring.size() > 1 && ring.front() == ring.back()) ring.pop_back();
  if (ring.size() < 3) {
    throw ValidationError("ring " + std::to_string(ring_index) + ": fewer than 3 distinct vertices");
  }
  return ring;
}

struct Edge {
  Point2 a, b;
  std::size_t index;
  double min_x() const { return std::min(a.x, b.x); }
  double max_x() const { return std::max(a.x, b.x); }
};

inline std::vector<Edge> ring_edges(const Ring& ring) {
  std::vector<Edge> edges;
  edges.reserve(ring.size());
  for (std::size_t i = 0; i < ring.size(); ++i) edges.push_back({ring[i], ring[(i + 1) % ring.size()], i});
  return edges;
}

/// Calls `fn(e, f)` for every pair of edges from `a` and `b` whose x-extents overlap.
/// When `same` is set the pairs are drawn from one list (each unordered pair once).
template <typename Fn>
void sweep_edge_pairs(std::vector<Edge> a, std::vector<Edge> b, bool same, Fn&& fn) {
  auto by_min_x = [](const Edge& l, const Edge& r) { return l.min_x() < r.min_x(); };
  if (same) {
    std::sort(a.begin(), a.end(), by_min_x);
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (std::size_t j = i + 1; j < a.size() && a[j].min_x() <= a[i].max_x(); ++j) {
        if (!fn(a[i], a[j])) return;
      }
    }
    return;
  }
  std::sort(b.begin(), b.end(), by_min_x);
  for (const auto& e : a) {
    for (const auto& f : b) {
      if (f.min_x() > e.max_x()) break;
      if (f.max_x() < e.min_x()) continue;
      if (!fn(e, f)) return;
    }
  }
}

inline void check_ring_simple(const Ring& ring, std::size_t ring_index) {
  const std::size_t n = ring.size();
  sweep_edge_pairs(ring_edges(ring), {}, true, [&](const Edge& e, const Edge& f) {
    const std::size_t i = std::min(e.index, f.index);
    const std::size_t j = std::max(e.index, f.index);
    const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
    const SegmentContact c = classify_segments(e.a, e.b, f.a, f.b);
    if (adjacent ? c == SegmentContact::kOverlap : c != SegmentContact::kNone) {
      throw ValidationError("ring " + std::to_string(ring_index) + ": self-intersection between edges " +
                            std::to_string(i) + " and " + std::to_string(j));
    }
    return true;
  });
}

}  // namespace detail

enum class Location { kOutside, kBoundary, kInside };

/// Locates `p` relative to a closed ring (crossing-number rule, exact predicates).
inline Location locate_in_ring(Point2 p, std::span<const Point2> ring) {
  bool inside = false;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = ring[i];
    const Point2 b = ring[(i + 1) % n];
    const int o = predicates::orient(a, b, p);
    if (o == 0 && detail::within_box(a, b, p)) return Location::kBoundary;
    if ((a.y <= p.y) && (b.y > p.y) && o > 0) inside = !inside;
    if ((b.y <= p.y) && (a.y > p.y) && o < 0) inside = !inside;
  }
  return inside ? Location::kInside : Location::kOutside;
}

/// Polygon with holes. Exterior is counterclockwise, holes clockwise.
/// Construction validates and rejects (never repairs) bad rings; orientation
/// is normalised.
class Polygon {
 public:
  Polygon() = default;

  explicit Polygon(std::vector<Point2> exterior, std::vector<std::vector<Point2>> holes = {}) {
    exterior_ = detail::normalize_ring(std::move(exterior), 0);
    if (signed_area(exterior_) < 0) std::reverse(exterior_.begin(), exterior_.end());
    holes_.reserve(holes.size());
    for (std::size_t h = 0; h < holes.size(); ++h) {
      Ring r = detail::normalize_ring(std::move(holes[h]), h + 1);
      if (signed_area(r) > 0) std::reverse(r.begin(), r.end());
      holes_.push_back(std::move(r));
    }
    validate();
    bbox_ = bbox_of(exterior_);
  }

  const Ring& exterior() const { return exterior_; }
  const std::vector<Ring>& holes() const { return holes_; }
  const BBox& bbox() const { return bbox_; }

  /// Ring 0 is the exterior, ring k ≥ 1 is hole k−1.
  std::size_t ring_count() const { return 1 + holes_.size(); }
  const Ring& ring(std::size_t k) const { return k == 0 ? exterior_ : holes_[k - 1]; }

  double area() const {
    double a = signed_area(exterior_);
    for (const auto& h : holes_) a += signed_area(h);
    return a;
  }

  std::size_t vertex_count() const {
    std::size_t n = exterior_.size();
    for (const auto& h : holes_) n += h.size();
    return n;
  }

  friend bool operator==(const Polygon& a, const Polygon& b) {
    return a.exterior_ == b.exterior_ && a.holes_ == b.holes_;
  }

 private:
  void validate() const {
    if (signed_area(exterior_) <= kAreaTolerance) throw ValidationError("ring 0: area is not positive");
    detail::check_ring_simple(exterior_, 0);
    const auto ext_edges = detail::ring_edges(exterior_);
    for (std::size_t h = 0; h < holes_.size(); ++h) {
      const std::size_t ri = h + 1;
      const Ring& hole = holes_[h];
      if (-signed_area(hole) <= kAreaTolerance) {
        throw ValidationError("ring " + std::to_string(ri) + ": area is not positive");
      }
      detail::check_ring_simple(hole, ri);
      check_rings_do_not_cross(ext_edges, hole, ri);
      if (!has_vertex_with(hole, exterior_, Location::kInside) ||
          has_vertex_with(hole, exterior_, Location::kOutside)) {
        throw ValidationError("ring " + std::to_string(ri) + ": hole is not inside the exterior");
      }
      for (std::size_t g = 0; g < h; ++g) {
        check_rings_do_not_cross(detail::ring_edges(holes_[g]), hole, ri);
        if (has_vertex_with(hole, holes_[g], Location::kInside) ||
            has_vertex_with(holes_[g], hole, Location::kInside)) {
          throw ValidationError("ring " + std::to_string(ri) + ": hole overlaps ring " +
                                std::to_string(g + 1));
        }
      }
    }
  }

  static bool has_vertex_with(const Ring& ring, const Ring& container, Location where) {
    return std::any_of(ring.begin(), ring.end(),
                       [&](Point2 p) { return locate_in_ring(p, container) == where; });
  }

  // Holes may touch other rings at isolated points but never cross or share edges.
  static void check_rings_do_not_cross(const std::vector<detail::Edge>& other, const Ring& ring,
                                       std::size_t ring_index) {
    detail::sweep_edge_pairs(detail::ring_edges(ring), other, false,
                             [&](const detail::Edge& e, const detail::Edge& f) {
                               const SegmentContact c = classify_segments(e.a, e.b, f.a, f.b);
                               if (c == SegmentContact::kProper || c == SegmentContact::kOverlap) {
                                 throw ValidationError("ring " + std::to_string(ring_index) +
                                                       ": crosses another ring at edge " +
                                                       std::to_string(e.index));
                               }
                               return true;
                             });
  }

  Ring exterior_;
  std::vector<Ring> holes_;
  BBox bbox_;
};

struct MultiPolygon {
  std::vector<Polygon> parts;

  double area() const {
    double a = 0.0;
    for (const auto& p : parts) a += p.area();
    return a;
  }
  bool empty() const { return parts.empty(); }
  friend bool operator==(const MultiPolygon&, const MultiPolygon&) = default;
};

// ---------------------------------------------------------------------------
// Queries

inline Location locate(Point2 p, const Polygon& poly) {
  if (!poly.bbox().contains(p)) return Location::kOutside;
  const Location ext = locate_in_ring(p, poly.exterior());
  if (ext != Location::kInside) return ext;
  for (const auto& hole : poly.holes()) {
    const Location h = locate_in_ring(p, hole);
    if (h == Location::kBoundary) return Location::kBoundary;
    if (h == Location::kInside) return Location::kOutside;
  }
  return Location::kInside;
}

/// Boundary points count as inside.
inline bool point_in_polygon(Point2 p, const Polygon& poly) { return locate(p, poly) != Location::kOutside; }

inline bool point_in_polygon(Point2 p, const MultiPolygon& mp) {
  return std::any_of(mp.parts.begin(), mp.parts.end(), [&](const Polygon& q) { return point_in_polygon(p, q); });
}

struct BoundaryHit {
  Point2 point;
  double distance = std::numeric_limits<double>::infinity();
  std::size_t ring = 0;
  std::size_t edge = 0;
};

/// Nearest point on any ring of `poly`; no containment requirement.
inline BoundaryHit nearest_boundary_point(Point2 p, const Polygon& poly) {
  BoundaryHit best;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < poly.ring_count(); ++k) {
    const Ring& r = poly.ring(k);
    for (std::size_t i = 0; i < r.size(); ++i) {
      const Point2 c = closest_point_on_segment(p, r[i], r[(i + 1) % r.size()]);
      const double d2 = squared_distance(p, c);
      if (d2 < best_d2) {
        best_d2 = d2;
        best = {c, 0.0, k, i};
      }
    }
  }
  best.distance = std::sqrt(best_d2);
  return best;
}

/// Distance to the boundary, or 0 when `p` is outside.
inline double clearance(Point2 p, const Polygon& poly) {
  if (!point_in_polygon(p, poly)) return 0.0;
  return nearest_boundary_point(p, poly).distance;
}

/// Euclidean distance from an interior point to the nearest ring.
inline double distance_to_boundary(Point2 p, const Polygon& poly) {
  if (!point_in_polygon(p, poly)) {
    throw ValidationError("distance_to_boundary: point (" + std::to_string(p.x) + ", " +
                          std::to_string(p.y) + ") is outside the polygon");
  }
  return nearest_boundary_point(p, poly).distance;
}

// ---------------------------------------------------------------------------
// Densification and simplification

/// Densified closed ring (open representation); original vertices retained.
inline std::vector<Point2> densify_ring(std::span<const Point2> ring, double interval) {
  if (!(interval > 0.0)) throw ValidationError("densify interval must be positive");
  std::vector<Point2> out;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = ring[i];
    const Point2 b = ring[(i + 1) % n];
    const double len = distance(a, b);
    const auto parts = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / interval - 1e-9)));
    out.push_back(a);
    for (std::size_t k = 1; k < parts; ++k) {
      out.push_back(a + (b - a) * (static_cast<double>(k) / static_cast<double>(parts)));
    }
  }
  return out;
}

/// All rings densified and concatenated (exterior first, then holes).
inline std::vector<Point2> densify_boundary(const Polygon& poly, double interval) {
  std::vector<Point2> out;
  for (std::size_t k = 0; k < poly.ring_count(); ++k) {
    auto r = densify_ring(poly.ring(k), interval);
    out.insert(out.end(), r.begin(), r.end());
  }
  return out;
}

/// Douglas–Peucker simplification. Endpoints are kept; tolerance 0 is the identity.
inline Polyline simplify_polyline(const Polyline& line, double tolerance) {
  if (tolerance < 0.0) throw ValidationError("simplify tolerance must be non-negative");
  const auto& v = line.vertices();
  if (tolerance == 0.0 || v.size() <= 2) return line;
  std::vector<bool> keep(v.size(), false);
  keep.front() = keep.back() = true;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, v.size() - 1}};
  while (!stack.empty()) {
    const auto [lo, hi] = stack.back();
    stack.pop_back();
    double worst = -1.0;
    std::size_t worst_i = lo;
    for (std::size_t i = lo + 1; i < hi; ++i) {
      const double d = point_segment_distance(v[i], v[lo], v[hi]);
      if (d > worst) {
        worst = d;
        worst_i = i;
      }
    }
    if (worst > tolerance) {
      keep[worst_i] = true;
      stack.emplace_back(lo, worst_i);
      stack.emplace_back(worst_i, hi);
    }
  }
  std::vector<Point2> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (keep[i]) out.push_back(v[i]);
  }
  return Polyline(std::move(out));
}

// ---------------------------------------------------------------------------
// Constructors for common shapes

inline Polygon make_rectangle(double x0, double y0, double x1, double y1) {
  return Polygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

/// Regular n-gon whose edges are tangent to the circle of `radius` (contains the circle).
inline Polygon make_circumscribed_ngon(Point2 center, double radius, int sides) {
  if (!(radius > 0.0)) throw ValidationError("circle radius must be positive");
  const double pi = std::acos(-1.0);
  const double vertex_radius = radius / std::cos(pi / sides);
  std::vector<Point2> ring;
  ring.reserve(static_cast<std::size_t>(sides));
  for (int i = 0; i < sides; ++i) {
    const double a = 2.0 * pi * (i + 0.5) / sides;
    ring.push_back({center.x + vertex_radius * std::cos(a), center.y + vertex_radius * std::sin(a)});
  }
  return Polygon(std::move(ring));
}

}  // namespace sidewalk
