#pragma once

// Centerline networks from the Voronoi diagram of a densified boundary:
// skeleton extraction, dead-end pruning, and segmentation with minimum widths.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sidewalk/delaunay.hpp"
#include "sidewalk/error.hpp"
#include "sidewalk/geom.hpp"
#include "sidewalk/spatial.hpp"

namespace sidewalk {

struct CenterlineParams {
  double densify_interval = 0.3;
  double simplify_tolerance = 0.2;
  double deadend_min_length = 1.5;
  double max_segment_length = 10.0;
  // A leaf is also a dead-end when shorter than this multiple of the
  // clearance at its junction (corner spurs of wide polygons).
  double spur_clearance_factor = 1.5;

  void validate() const {
    for (double v : {densify_interval, simplify_tolerance, deadend_min_length, max_segment_length}) {
      if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError("centerline: all parameters must be positive");
    }
    if (!(spur_clearance_factor >= 0.0)) throw ValidationError("centerline: spur_clearance_factor must be non-negative");
  }
};

struct PathSegment {
  Polyline geometry;
  double min_width = 0.0;
  std::string id;
};

/// Widths are reported to the micrometre; finer digits are construction noise.
inline double round_width(double w) { return std::round(w * 1e6) / 1e6; }

namespace detail {

struct SiteRef {
  std::uint32_t ring = 0;
  std::uint32_t index = 0;
  std::uint32_t ring_size = 0;
};

/// Moves an interior point onto the centre of the largest empty disk that
/// touches the boundary at the point's nearest boundary point.
inline Point2 center_on_axis(Point2 v, const SegmentIndex& idx, double span) {
  const BoundaryHit hit = idx.nearest(v);
  if (!(hit.distance > 0.0)) return v;
  const Point2 u = (v - hit.point) * (1.0 / hit.distance);
  constexpr double kTol = 1e-9;
  auto empty = [&](double t) { return idx.distance_to(hit.point + u * t) >= t - kTol; };
  double lo = hit.distance, hi = 2.0 * hit.distance;
  while (empty(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > span) return hit.point + u * lo;
  }
  for (int it = 0; it < 100 && hi - lo > 1e-11 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (empty(mid) ? lo : hi) = mid;
  }
  return hit.point + u * lo;
}

inline void canonicalize(std::vector<Point2>& pts) {
  if (pts.size() > 2 && pts.front() == pts.back()) {
    pts.pop_back();
    std::rotate(pts.begin(), std::min_element(pts.begin(), pts.end()), pts.end());
    if (pts.size() > 2 && pts.back() < pts[1]) std::reverse(pts.begin() + 1, pts.end());
    pts.push_back(pts.front());
  } else if (pts.back() < pts.front()) {
    std::reverse(pts.begin(), pts.end());
  }
}

inline std::vector<Polyline> sorted_polylines(std::vector<std::vector<Point2>> chains) {
  for (auto& c : chains) canonicalize(c);
  std::sort(chains.begin(), chains.end());
  std::vector<Polyline> out;
  out.reserve(chains.size());
  for (auto& c : chains) out.emplace_back(std::move(c));
  return out;
}

inline void push_distinct(std::vector<Point2>& pts, Point2 p) {
  if (pts.empty() || pts.back() != p) pts.push_back(p);
}

inline std::vector<Polyline> skeleton_of_part(const Polygon& poly, const CenterlineParams& params) {
  std::vector<Point2> sites;
  std::vector<SiteRef> refs;
  for (std::size_t k = 0; k < poly.ring_count(); ++k) {
    const auto ring = densify_ring(poly.ring(k), params.densify_interval);
    for (std::size_t i = 0; i < ring.size(); ++i) {
      sites.push_back(ring[i]);
      refs.push_back({static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(i),
                      static_cast<std::uint32_t>(ring.size())});
    }
  }
  const DelaunayTriangulation dt(sites);
  const SegmentIndex idx(poly);
  const auto& tris = dt.triangles();
  const BBox& box = poly.bbox();
  const double span = std::hypot(box.max_x - box.min_x, box.max_y - box.min_y);
  const double scale = std::max({std::abs(box.min_x), std::abs(box.max_x), std::abs(box.min_y), std::abs(box.max_y), 1.0});
  const double merge_tol = 1e-10 * scale;

  std::vector<char> inside(tris.size(), 0);
  std::vector<Point2> center(tris.size());
  for (std::size_t t = 0; t < tris.size(); ++t) {
    if (!dt.is_real(tris[t])) continue;
    center[t] = dt.circumcenter(tris[t]);
    inside[t] = is_finite(center[t]) && locate(center[t], poly) == Location::kInside;
  }
  auto ring_adjacent = [&](std::uint32_t a, std::uint32_t b) {
    const SiteRef &ra = refs[a], &rb = refs[b];
    if (ra.ring != rb.ring) return false;
    const std::uint32_t d = ra.index > rb.index ? ra.index - rb.index : rb.index - ra.index;
    return d == 1 || d + 1 == ra.ring_size;
  };
  auto crosses_boundary = [&](Point2 a, Point2 b) {
    BBox eb;
    eb.expand(a);
    eb.expand(b);
    bool hit = false;
    idx.for_each_candidate(eb, [&](const SegmentIndex::Segment& s) {
      if (!hit && classify_segments(a, b, s.a, s.b) != SegmentContact::kNone) hit = true;
    });
    return hit;
  };

  std::vector<std::uint32_t> parent(tris.size());
  std::iota(parent.begin(), parent.end(), 0u);
  std::function<std::uint32_t(std::uint32_t)> find = [&](std::uint32_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  std::vector<std::pair<std::uint32_t, std::uint32_t>> links;
  for (std::uint32_t t = 0; t < tris.size(); ++t) {
    if (!inside[t]) continue;
    for (unsigned i = 0; i < 3; ++i) {
      const auto n = tris[t].adj[i];
      if (n == DelaunayTriangulation::kNone || n < t || !inside[n]) continue;
      if (distance(center[t], center[n]) <= merge_tol) {
        const auto a = find(t), b = find(n);
        parent[std::max(a, b)] = std::min(a, b);
        continue;
      }
      const auto sa = tris[t].v[(i + 1) % 3], sb = tris[t].v[(i + 2) % 3];
      if (ring_adjacent(sa, sb)) continue;
      if (crosses_boundary(center[t], center[n])) continue;
      links.emplace_back(t, n);
    }
  }

  std::map<std::uint32_t, std::set<std::uint32_t>> adj;
  for (auto [t, n] : links) {
    const auto a = find(t), b = find(n);
    if (a == b) continue;
    adj[a].insert(b);
    adj[b].insert(a);
  }
  std::map<std::uint32_t, Point2> pos;
  double widest = 0.0;
  for (const auto& [node, nbrs] : adj) {
    pos[node] = center_on_axis(center[node], idx, span);
    widest = std::max(widest, idx.distance_to(pos[node]));
  }
  if (2.0 * widest < params.densify_interval) return {};

  std::set<std::pair<std::uint32_t, std::uint32_t>> used;
  auto mark = [&](std::uint32_t a, std::uint32_t b) { return used.insert({std::min(a, b), std::max(a, b)}).second; };
  std::vector<std::vector<Point2>> chains;
  auto walk = [&](std::uint32_t start, std::uint32_t first) {
    std::vector<Point2> pts{pos[start]};
    std::uint32_t prev = start, cur = first;
    mark(start, first);
    while (true) {
      push_distinct(pts, pos[cur]);
      if (adj[cur].size() != 2 || cur == start) break;
      const auto it = adj[cur].begin();
      const std::uint32_t next = *it == prev ? *std::next(it) : *it;
      if (!mark(cur, next)) break;
      prev = cur;
      cur = next;
    }
    if (pts.size() >= 2 && !(pts.size() == 2 && pts.front() == pts.back())) chains.push_back(std::move(pts));
  };
  for (const auto& [node, nbrs] : adj) {
    if (nbrs.size() == 2) continue;
    for (auto m : nbrs) {
      if (!used.count({std::min(node, m), std::max(node, m)})) walk(node, m);
    }
  }
  for (const auto& [node, nbrs] : adj) {
    for (auto m : nbrs) {
      if (!used.count({std::min(node, m), std::max(node, m)})) walk(node, m);
    }
  }
  std::erase_if(chains, [](const std::vector<Point2>& c) { return c.size() < 2 || (c.size() == 3 && c.front() == c.back()); });
  return sorted_polylines(std::move(chains));
}

}  // namespace detail

/// Approximate medial axis: interior Voronoi edges between boundary samples
/// that are not neighbours along a ring, chained at degree-2 vertices.
/// Empty when the polygon is thinner than the sampling interval.
inline std::vector<Polyline> skeletonize(const Polygon& poly, const CenterlineParams& params) {
  params.validate();
  return detail::skeleton_of_part(poly, params);
}

inline std::vector<Polyline> skeletonize(const MultiPolygon& mp, const CenterlineParams& params) {
  params.validate();
  std::vector<std::vector<Point2>> all;
  for (const auto& part : mp.parts) {
    for (const auto& line : detail::skeleton_of_part(part, params)) all.push_back(line.vertices());
  }
  return detail::sorted_polylines(std::move(all));
}

/// Distance from a point to the polygon boundary. Given to prune, it enables
/// the relative spur threshold and clearance-preserving simplification.
using ClearanceFn = std::function<double(Point2)>;

namespace detail {

struct Branch {
  std::vector<Point2> pts;
  double length = 0.0;
  bool alive = true;
};

inline double chain_length(const std::vector<Point2>& pts) {
  double s = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) s += distance(pts[i - 1], pts[i]);
  return s;
}

inline std::map<Point2, int> degrees(const std::vector<Branch>& branches) {
  std::map<Point2, int> deg;
  for (const auto& b : branches) {
    if (!b.alive) continue;
    ++deg[b.pts.front()];
    ++deg[b.pts.back()];
  }
  return deg;
}

/// Joins branches through every node where exactly two distinct branches meet.
inline void merge_through_nodes(std::vector<Branch>& branches) {
  bool changed = true;
  while (changed) {
    changed = false;
    std::map<Point2, std::vector<std::size_t>> inc;
    for (std::size_t i = 0; i < branches.size(); ++i) {
      if (!branches[i].alive) continue;
      inc[branches[i].pts.front()].push_back(i);
      inc[branches[i].pts.back()].push_back(i);
    }
    for (const auto& [node, list] : inc) {
      if (list.size() != 2 || list[0] == list[1]) continue;
      Branch& a = branches[list[0]];
      Branch& b = branches[list[1]];
      if (a.pts.back() != node) std::reverse(a.pts.begin(), a.pts.end());
      if (b.pts.front() != node) std::reverse(b.pts.begin(), b.pts.end());
      a.pts.insert(a.pts.end(), b.pts.begin() + 1, b.pts.end());
      a.length = chain_length(a.pts);
      b.alive = false;
      changed = true;
      break;
    }
  }
}

/// Douglas–Peucker that also rejects any chord whose sampled clearance falls
/// below the clearance of the stretch it replaces.
inline std::vector<Point2> simplify_open(const std::vector<Point2>& v, double tolerance,
                                         const std::function<double(Point2)>& clearance, double interval) {
  if (v.size() <= 2) return v;
  auto min_clearance = [&](std::size_t lo, std::size_t hi, bool chord) {
    std::vector<Point2> pts;
    if (chord) {
      pts = {v[lo], v[hi]};
    } else {
      pts.assign(v.begin() + static_cast<std::ptrdiff_t>(lo), v.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
    }
    double m = std::numeric_limits<double>::infinity();
    for (const Point2 p : densify_polyline(Polyline(std::move(pts)), interval)) m = std::min(m, clearance(p));
    return m;
  };
  std::vector<bool> keep(v.size(), false);
  keep.front() = keep.back() = true;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, v.size() - 1}};
  while (!stack.empty()) {
    const auto [lo, hi] = stack.back();
    stack.pop_back();
    if (hi - lo < 2) continue;
    double worst = -1.0;
    std::size_t worst_i = lo + 1;
    for (std::size_t i = lo + 1; i < hi; ++i) {
      const double d = point_segment_distance(v[i], v[lo], v[hi]);
      if (d > worst) {
        worst = d;
        worst_i = i;
      }
    }
    bool split = worst > tolerance;
    if (!split && clearance) split = min_clearance(lo, hi, true) < min_clearance(lo, hi, false) - 1e-9;
    if (split) {
      keep[worst_i] = true;
      stack.emplace_back(lo, worst_i);
      stack.emplace_back(worst_i, hi);
    }
  }
  std::vector<Point2> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (keep[i]) out.push_back(v[i]);
  }
  return out;
}

inline std::vector<Point2> simplify_chain(const std::vector<Point2>& pts, double tolerance,
                                          const std::function<double(Point2)>& clearance, double interval) {
  if (pts.size() < 4 || pts.front() != pts.back()) return simplify_open(pts, tolerance, clearance, interval);
  // Split a loop at its farthest vertex so both halves have a proper baseline.
  std::size_t far = 1;
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    if (squared_distance(pts[i], pts[0]) > squared_distance(pts[far], pts[0])) far = i;
  }
  auto out = simplify_open({pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(far) + 1}, tolerance, clearance, interval);
  const auto h2 = simplify_open({pts.begin() + static_cast<std::ptrdiff_t>(far), pts.end()}, tolerance, clearance, interval);
  out.insert(out.end(), h2.begin() + 1, h2.end());
  return out;
}

}  // namespace detail

/// Removes leaf branches shorter than the dead-end threshold until nothing
/// changes, then simplifies. A junction never loses all of its branches: if
/// every branch qualifies, the two longest survive. Isolated paths are kept.
inline std::vector<Polyline> prune(const std::vector<Polyline>& skeleton, const CenterlineParams& params,
                                   const ClearanceFn& clearance = {}) {
  params.validate();
  std::vector<detail::Branch> branches;
  for (const auto& line : skeleton) branches.push_back({line.vertices(), line.length(), true});
  detail::merge_through_nodes(branches);

  while (true) {
    const auto deg = detail::degrees(branches);
    std::map<Point2, std::vector<std::size_t>> leaves_at;
    for (std::size_t i = 0; i < branches.size(); ++i) {
      const auto& b = branches[i];
      if (!b.alive || b.pts.front() == b.pts.back()) continue;
      const int df = deg.at(b.pts.front()), db = deg.at(b.pts.back());
      Point2 junction;
      if (df == 1 && db >= 3) {
        junction = b.pts.back();
      } else if (db == 1 && df >= 3) {
        junction = b.pts.front();
      } else {
        continue;
      }
      double threshold = params.deadend_min_length;
      if (clearance) threshold = std::max(threshold, params.spur_clearance_factor * clearance(junction));
      if (b.length < threshold) leaves_at[junction].push_back(i);
    }
    bool removed = false;
    for (auto& [junction, leaves] : leaves_at) {
      const int remaining = deg.at(junction) - static_cast<int>(leaves.size());
      std::stable_sort(leaves.begin(), leaves.end(),
                       [&](std::size_t a, std::size_t b) { return branches[a].length > branches[b].length; });
      const std::size_t keep = remaining == 0 ? 2 : 0;
      for (std::size_t k = keep; k < leaves.size(); ++k) {
        branches[leaves[k]].alive = false;
        removed = true;
      }
    }
    if (!removed) break;
    detail::merge_through_nodes(branches);
  }

  std::vector<std::vector<Point2>> out;
  for (const auto& b : branches) {
    if (b.alive) out.push_back(detail::simplify_chain(b.pts, params.simplify_tolerance, clearance, params.densify_interval));
  }
  return detail::sorted_polylines(std::move(out));
}

namespace detail {

/// Splits `pts` into `parts` pieces of equal arc length.
inline std::vector<std::vector<Point2>> split_equal(const std::vector<Point2>& pts, std::size_t parts) {
  std::vector<double> cum(pts.size(), 0.0);
  for (std::size_t i = 1; i < pts.size(); ++i) cum[i] = cum[i - 1] + distance(pts[i - 1], pts[i]);
  const double total = cum.back();
  std::vector<std::vector<Point2>> out;
  std::size_t i = 0;
  std::vector<Point2> cur{pts.front()};
  for (std::size_t k = 1; k <= parts; ++k) {
    if (k == parts) {
      for (++i; i < pts.size(); ++i) push_distinct(cur, pts[i]);
      out.push_back(std::move(cur));
      break;
    }
    const double target = total * static_cast<double>(k) / static_cast<double>(parts);
    while (i + 1 < pts.size() && cum[i + 1] <= target) push_distinct(cur, pts[++i]);
    Point2 cut = pts[i];
    if (i + 1 < pts.size() && cum[i + 1] > cum[i]) {
      const double t = (target - cum[i]) / (cum[i + 1] - cum[i]);
      cut = pts[i] + (pts[i + 1] - pts[i]) * t;
    }
    push_distinct(cur, cut);
    out.push_back(std::move(cur));
    cur = {cut};
  }
  std::erase_if(out, [](const std::vector<Point2>& p) { return p.size() < 2; });
  return out;
}

inline double clearance_indexed(Point2 p, const Polygon& poly, const SegmentIndex& idx) {
  if (locate(p, poly) == Location::kOutside) return 0.0;
  return idx.distance_to(p);
}

}  // namespace detail

/// Minimum width of a path inside `poly`: twice the smallest clearance over
/// the path sampled at `interval`.
inline double min_width_along(const Polyline& path, const Polygon& poly, const SegmentIndex& idx, double interval) {
  double m = std::numeric_limits<double>::infinity();
  for (const Point2 p : densify_polyline(path, interval)) m = std::min(m, detail::clearance_indexed(p, poly, idx));
  return round_width(2.0 * m);
}

/// Splits paths at junctions, then splits pieces longer than
/// max_segment_length into equal parts, and records each part's minimum width.
/// Segment ids are `id_prefix` followed by a running index.
inline std::vector<PathSegment> segmentize(const std::vector<Polyline>& paths, const Polygon& poly,
                                           const CenterlineParams& params, const std::string& id_prefix = "") {
  params.validate();
  const SegmentIndex idx(poly);
  std::map<Point2, int> deg;
  for (const auto& line : paths) {
    const auto& v = line.vertices();
    for (std::size_t i = 0; i < v.size(); ++i) deg[v[i]] += (i == 0 || i + 1 == v.size()) ? 1 : 2;
  }
  std::vector<std::vector<Point2>> pieces;
  for (const auto& line : paths) {
    const auto& v = line.vertices();
    std::vector<Point2> cur{v.front()};
    for (std::size_t i = 1; i < v.size(); ++i) {
      cur.push_back(v[i]);
      if (i + 1 < v.size() && deg[v[i]] != 2) {
        pieces.push_back(std::move(cur));
        cur = {v[i]};
      }
    }
    pieces.push_back(std::move(cur));
  }

  std::vector<PathSegment> out;
  for (const auto& piece : pieces) {
    const double len = detail::chain_length(piece);
    if (!(len > 0.0)) continue;
    auto parts = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / params.max_segment_length - 1e-9)));
    if (piece.front() == piece.back()) parts = std::max<std::size_t>(parts, 2);
    for (auto& part : detail::split_equal(piece, parts)) {
      Polyline geom(std::move(part));
      const double w = min_width_along(geom, poly, idx, params.densify_interval);
      out.push_back({std::move(geom), w, id_prefix + std::to_string(out.size())});
    }
  }
  return out;
}

/// Skeleton, pruning (with the junction-clearance spur rule) and segmentation
/// for every part of `mp`.
inline std::vector<PathSegment> centerline_segments(const MultiPolygon& mp, const CenterlineParams& params,
                                                    const std::string& id_prefix = "") {
  std::vector<PathSegment> out;
  for (const auto& part : mp.parts) {
    const SegmentIndex idx(part);
    const auto pruned = prune(skeletonize(part, params), params, [&](Point2 p) { return idx.distance_to(p); });
    for (auto& s : segmentize(pruned, part, params)) {
      s.id = id_prefix + std::to_string(out.size());
      out.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace sidewalk
