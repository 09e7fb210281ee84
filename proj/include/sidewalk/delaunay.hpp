#pragma once

// Incremental (Bowyer–Watson) Delaunay triangulation on exact predicates and
// the dual Voronoi diagram.

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <unordered_map>
#include <vector>

#include "sidewalk/error.hpp"
#include "sidewalk/geom.hpp"
#include "sidewalk/predicates.hpp"

namespace sidewalk {

class DelaunayTriangulation {
 public:
  static constexpr std::uint32_t kNone = 0xffffffffu;

  /// Counterclockwise triangle; `adj[i]` is the neighbour across the edge opposite `v[i]`.
  struct Triangle {
    std::array<std::uint32_t, 3> v;
    std::array<std::uint32_t, 3> adj;
  };

  /// Throws ValidationError when fewer than three distinct, non-collinear sites are given.
  explicit DelaunayTriangulation(std::span<const Point2> sites) : site_count_(sites.size()) {
    points_.assign(sites.begin(), sites.end());
    representative_.resize(sites.size());
    for (const auto& p : points_) {
      if (!is_finite(p)) throw ValidationError("triangulation site is not finite");
    }

    std::vector<std::uint32_t> order(sites.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(),
              [&](std::uint32_t a, std::uint32_t b) { return std::tie(points_[a], a) < std::tie(points_[b], b); });
    std::vector<std::uint32_t> unique;
    for (std::size_t k = 0; k < order.size(); ++k) {
      if (k > 0 && points_[order[k]] == points_[order[k - 1]]) {
        representative_[order[k]] = representative_[order[k - 1]];
      } else {
        representative_[order[k]] = order[k];
        unique.push_back(order[k]);
      }
    }
    if (unique.size() < 3) throw ValidationError("triangulation needs at least 3 distinct sites");
    bool collinear = true;
    for (std::size_t k = 2; k < unique.size() && collinear; ++k) {
      collinear = predicates::orient(points_[unique[0]], points_[unique[1]], points_[unique[k]]) == 0;
    }
    if (collinear) throw ValidationError("triangulation sites are all collinear");

    add_super_triangle();
    std::mt19937 rng(0x5eed);
    std::shuffle(unique.begin(), unique.end(), rng);
    for (auto idx : unique) insert(idx);
    compact();
  }

  /// Input sites followed by the three bounding super vertices.
  const std::vector<Point2>& points() const { return points_; }
  std::size_t site_count() const { return site_count_; }
  bool is_super(std::uint32_t v) const { return v >= site_count_; }
  bool is_real(const Triangle& t) const { return !is_super(t.v[0]) && !is_super(t.v[1]) && !is_super(t.v[2]); }
  /// Index of the first site with the same coordinates.
  std::uint32_t representative(std::size_t site) const { return representative_[site]; }
  const std::vector<Triangle>& triangles() const { return triangles_; }

  Point2 circumcenter(const Triangle& t) const {
    const Point2 a = points_[t.v[0]];
    const Point2 b = points_[t.v[1]] - a;
    const Point2 c = points_[t.v[2]] - a;
    const double d = 2.0 * cross(b, c);
    const double b2 = dot(b, b);
    const double c2 = dot(c, c);
    return {a.x + (c.y * b2 - b.y * c2) / d, a.y + (b.x * c2 - c.x * b2) / d};
  }

  double circumradius(const Triangle& t) const { return distance(circumcenter(t), points_[t.v[0]]); }

 private:
  void add_super_triangle() {
    BBox box = bbox_of(points_);
    const double span = std::max({box.max_x - box.min_x, box.max_y - box.min_y, 1.0});
    const Point2 mid{0.5 * (box.min_x + box.max_x), 0.5 * (box.min_y + box.max_y)};
    const double r = 1e5 * span;
    points_.push_back({mid.x - 2.0 * r, mid.y - r});
    points_.push_back({mid.x + 2.0 * r, mid.y - r});
    points_.push_back({mid.x, mid.y + 2.0 * r});
    const auto s = static_cast<std::uint32_t>(site_count_);
    work_.push_back({{s, s + 1, s + 2}, {kNone, kNone, kNone}});
    alive_.push_back(1);
    last_ = 0;
  }

  std::uint32_t locate(Point2 p) const {
    std::uint32_t t = last_;
    unsigned rot = 0;
    for (;;) {
      const Triangle& tri = work_[t];
      bool moved = false;
      for (unsigned k = 0; k < 3; ++k) {
        const unsigned i = (k + rot) % 3;
        const Point2 a = points_[tri.v[(i + 1) % 3]];
        const Point2 b = points_[tri.v[(i + 2) % 3]];
        if (predicates::orient(a, b, p) < 0) {
          t = tri.adj[i];
          moved = true;
          break;
        }
      }
      if (!moved) return t;
      rot = (rot + 1) % 3;
    }
  }

  bool in_conflict(std::uint32_t t, Point2 p) const {
    const Triangle& tri = work_[t];
    return predicates::incircle(points_[tri.v[0]], points_[tri.v[1]], points_[tri.v[2]], p) > 0;
  }

  void insert(std::uint32_t idx) {
    const Point2 p = points_[idx];
    const std::uint32_t start = locate(p);

    std::vector<std::uint32_t> cavity{start};
    in_cavity_.resize(work_.size(), 0);
    in_cavity_[start] = 1;
    for (std::size_t k = 0; k < cavity.size(); ++k) {
      for (auto n : work_[cavity[k]].adj) {
        if (n != kNone && !in_cavity_[n] && in_conflict(n, p)) {
          in_cavity_[n] = 1;
          cavity.push_back(n);
        }
      }
    }

    struct BoundaryEdge {
      std::uint32_t a, b, outer, old;
    };
    std::vector<BoundaryEdge> boundary;
    for (bool grown = true; grown;) {
      grown = false;
      boundary.clear();
      for (auto t : cavity) {
        const Triangle& tri = work_[t];
        for (unsigned i = 0; i < 3; ++i) {
          const auto n = tri.adj[i];
          if (n != kNone && in_cavity_[n]) continue;
          const auto a = tri.v[(i + 1) % 3];
          const auto b = tri.v[(i + 2) % 3];
          if (predicates::orient(points_[a], points_[b], p) <= 0 && n != kNone) {
            // Cocircular configuration: absorb the neighbour to keep the cavity star-shaped.
            in_cavity_[n] = 1;
            cavity.push_back(n);
            grown = true;
            break;
          }
          boundary.push_back({a, b, n, t});
        }
        if (grown) break;
      }
    }

    for (auto t : cavity) {
      alive_[t] = 0;
      in_cavity_[t] = 0;
    }

    std::unordered_map<std::uint32_t, std::uint32_t> starting_at;
    std::unordered_map<std::uint32_t, std::uint32_t> ending_at;
    std::vector<std::uint32_t> created;
    created.reserve(boundary.size());
    for (const auto& e : boundary) {
      const auto id = static_cast<std::uint32_t>(work_.size());
      work_.push_back({{e.a, e.b, idx}, {kNone, kNone, e.outer}});
      alive_.push_back(1);
      starting_at[e.a] = id;
      ending_at[e.b] = id;
      created.push_back(id);
      if (e.outer != kNone) {
        for (auto& back : work_[e.outer].adj) {
          if (back == e.old) back = id;
        }
      }
    }
    for (auto id : created) {
      Triangle& tri = work_[id];
      tri.adj[0] = starting_at.at(tri.v[1]);
      tri.adj[1] = ending_at.at(tri.v[0]);
    }
    last_ = created.front();
  }

  void compact() {
    std::vector<std::uint32_t> remap(work_.size(), kNone);
    for (std::size_t t = 0; t < work_.size(); ++t) {
      if (alive_[t]) {
        remap[t] = static_cast<std::uint32_t>(triangles_.size());
        triangles_.push_back(work_[t]);
      }
    }
    for (auto& tri : triangles_) {
      for (auto& n : tri.adj) n = (n == kNone) ? kNone : remap[n];
    }
    work_.clear();
    work_.shrink_to_fit();
    alive_.clear();
    in_cavity_.clear();
  }

  std::size_t site_count_;
  std::vector<Point2> points_;
  std::vector<std::uint32_t> representative_;
  std::vector<Triangle> work_;
  std::vector<char> alive_;
  std::vector<char> in_cavity_;
  std::vector<Triangle> triangles_;
  std::uint32_t last_ = 0;
};

struct VoronoiEdge {
  Point2 a;
  Point2 b;
  std::size_t site_a = 0;
  std::size_t site_b = 0;
  /// Ray from `a` through `b` (b is a far point on the ray, not a vertex).
  bool unbounded = false;
};

struct VoronoiDiagram {
  std::vector<VoronoiEdge> edges;
};

/// Voronoi diagram of `sites` (duplicates collapse onto their first occurrence).
/// Zero-length edges from cocircular sites are omitted. Throws ValidationError
/// for fewer than three non-collinear sites.
inline VoronoiDiagram voronoi(std::span<const Point2> sites) {
  const DelaunayTriangulation dt(sites);
  const auto& tris = dt.triangles();
  const auto& pts = dt.points();
  const BBox box = bbox_of(sites);
  const double ray_length = 2.0 * (std::hypot(box.max_x - box.min_x, box.max_y - box.min_y) + 1.0);
  const double scale = std::max({std::abs(box.min_x), std::abs(box.max_x), std::abs(box.min_y),
                                 std::abs(box.max_y), 1.0});

  VoronoiDiagram out;
  for (std::uint32_t t = 0; t < tris.size(); ++t) {
    const auto& tri = tris[t];
    if (!dt.is_real(tri)) continue;
    const Point2 c = dt.circumcenter(tri);
    for (unsigned i = 0; i < 3; ++i) {
      const auto n = tri.adj[i];
      const auto a = tri.v[(i + 1) % 3];
      const auto b = tri.v[(i + 2) % 3];
      if (n == DelaunayTriangulation::kNone) continue;
      if (dt.is_real(tris[n])) {
        if (n < t) continue;
        const Point2 d = dt.circumcenter(tris[n]);
        if (distance(c, d) <= 1e-12 * scale) continue;
        out.edges.push_back({c, d, a, b, false});
      } else {
        const Point2 e = pts[b] - pts[a];
        const Point2 outward = Point2{e.y, -e.x} * (1.0 / norm(e));
        out.edges.push_back({c, c + outward * ray_length, a, b, true});
      }
    }
  }
  return out;
}

}  // namespace sidewalk
