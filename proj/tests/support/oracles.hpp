#pragma once

// Independent reference implementations used only by tests. None of these
// call into the library's algorithms beyond plain value types.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "sidewalk/geom.hpp"

namespace oracle {

using sidewalk::Point2;

/// Classic even-odd ray casting (W. Randolph Franklin's formulation).
inline bool ray_cast_ring(Point2 p, const std::vector<Point2>& ring) {
  bool c = false;
  const std::size_t n = ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2 a = ring[i];
    const Point2 b = ring[j];
    if (((a.y > p.y) != (b.y > p.y)) && (p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x)) c = !c;
  }
  return c;
}

inline bool ray_cast(Point2 p, const std::vector<Point2>& exterior,
                     const std::vector<std::vector<Point2>>& holes = {}) {
  if (!ray_cast_ring(p, exterior)) return false;
  for (const auto& h : holes) {
    if (ray_cast_ring(p, h)) return false;
  }
  return true;
}

/// Minimum distance to ring vertices after subdividing every edge at `step`.
inline double brute_boundary_distance(Point2 p, const std::vector<std::vector<Point2>>& rings, double step) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : rings) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      const Point2 a = r[i];
      const Point2 b = r[(i + 1) % r.size()];
      const double len = std::hypot(b.x - a.x, b.y - a.y);
      const int n = std::max(1, static_cast<int>(std::ceil(len / step)));
      for (int k = 0; k <= n; ++k) {
        const double t = static_cast<double>(k) / n;
        const double x = a.x + (b.x - a.x) * t;
        const double y = a.y + (b.y - a.y) * t;
        best = std::min(best, std::hypot(p.x - x, p.y - y));
      }
    }
  }
  return best;
}

struct Rect {
  double x0, y0, x1, y1;
  bool contains(double x, double y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
};

/// Area of a \ b by sampling cell centres of a `cell`-sized grid.
inline double raster_difference_area(const Rect& a, const Rect& b, double cell) {
  const auto nx = static_cast<long>(std::ceil((a.x1 - a.x0) / cell));
  const auto ny = static_cast<long>(std::ceil((a.y1 - a.y0) / cell));
  long count = 0;
  for (long i = 0; i < nx; ++i) {
    const double x = a.x0 + (i + 0.5) * cell;
    if (x > a.x1) continue;
    for (long j = 0; j < ny; ++j) {
      const double y = a.y0 + (j + 0.5) * cell;
      if (y > a.y1) continue;
      if (!b.contains(x, y)) ++count;
    }
  }
  return static_cast<double>(count) * cell * cell;
}

/// Union-find over all O(n²) pairs within `eps`; returns a canonical
/// partition (each cluster sorted, clusters sorted) of clusters ≥ min_size.
inline std::vector<std::vector<std::size_t>> brute_clusters(const std::vector<Point2>& pts, double eps,
                                                            std::size_t min_size) {
  std::vector<std::size_t> parent(pts.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t i) {
    return parent[i] == i ? i : parent[i] = find(parent[i]);
  };
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      if (std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y) <= eps) parent[find(i)] = find(j);
    }
  }
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < pts.size(); ++i) groups[find(i)].push_back(i);
  std::vector<std::vector<std::size_t>> out;
  for (auto& [root, members] : groups) {
    if (members.size() >= min_size) out.push_back(members);
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct GraphEdge {
  std::size_t a, b;
  double weight;
};

/// Minimum total weight over every simple path from `start` to `goal` that
/// stays within `allowed`; infinity when none exists. Path weights are summed
/// in travel order.
inline double enumerate_min_path(std::size_t node_count, const std::vector<GraphEdge>& edges, std::size_t start,
                                 std::size_t goal, const std::vector<bool>& allowed) {
  if (start == goal) return 0.0;
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(node_count);
  for (const auto& e : edges) {
    adj[e.a].push_back({e.b, e.weight});
    adj[e.b].push_back({e.a, e.weight});
  }
  double best = std::numeric_limits<double>::infinity();
  std::vector<bool> visited(node_count, false);
  std::function<void(std::size_t, double)> dfs = [&](std::size_t u, double acc) {
    if (acc >= best) return;
    if (u == goal) {
      best = acc;
      return;
    }
    visited[u] = true;
    for (const auto& [v, w] : adj[u]) {
      if (!visited[v] && allowed[v]) dfs(v, acc + w);
    }
    visited[u] = false;
  };
  dfs(start, 0.0);
  return best;
}

inline std::vector<Point2> random_star_polygon(std::mt19937& rng, std::size_t n, Point2 center, double r_min,
                                               double r_max) {
  std::uniform_real_distribution<double> rad(r_min, r_max);
  std::vector<Point2> ring;
  const double pi = std::acos(-1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 2.0 * pi * static_cast<double>(i) / static_cast<double>(n);
    const double r = rad(rng);
    ring.push_back({center.x + r * std::cos(a), center.y + r * std::sin(a)});
  }
  return ring;
}

/// Signed mean axial offset difference (B minus A) over every point of each
/// cloud inside the cylinder, scanned without any index. Returns counts too.
struct CylinderOracle {
  std::size_t na = 0, nb = 0;
  double distance = 0.0;
};

template <typename P3>
inline CylinderOracle brute_cylinder(const P3& core, const std::array<double, 3>& n, const std::vector<P3>& a,
                                     const std::vector<P3>& b, double radius, double halfdepth) {
  auto mean_axial = [&](const std::vector<P3>& pts, std::size_t& count) {
    double sum = 0.0;
    count = 0;
    for (const auto& p : pts) {
      const double vx = p.x - core.x, vy = p.y - core.y, vz = p.z - core.z;
      const double t = vx * n[0] + vy * n[1] + vz * n[2];
      const double rx = vx - t * n[0], ry = vy - t * n[1], rz = vz - t * n[2];
      if (std::abs(t) <= halfdepth && rx * rx + ry * ry + rz * rz <= radius * radius) {
        sum += t;
        ++count;
      }
    }
    return count ? sum / static_cast<double>(count) : 0.0;
  };
  CylinderOracle o;
  const double ma = mean_axial(a, o.na);
  const double mb = mean_axial(b, o.nb);
  o.distance = mb - ma;
  return o;
}

/// Number of distinct cubic cells of side `s` occupied by the points.
template <typename P3>
inline std::size_t occupied_cells(const std::vector<P3>& pts, double s) {
  std::set<std::array<long long, 3>> cells;
  for (const auto& p : pts) {
    cells.insert({static_cast<long long>(std::floor(p.x / s)), static_cast<long long>(std::floor(p.y / s)),
                  static_cast<long long>(std::floor(p.z / s))});
  }
  return cells.size();
}

}  // namespace oracle
