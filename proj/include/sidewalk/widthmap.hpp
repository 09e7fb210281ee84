#pragma once

// Width categories, the penalised detailed-path graph, routing, and the
// mapping of detailed routes onto major path segments.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include <json.hpp>

#include "sidewalk/centerline.hpp"
#include "sidewalk/error.hpp"
#include "sidewalk/geom.hpp"
#include "sidewalk/spatial.hpp"

namespace sidewalk {

enum class WidthCategory { kLt090 = 0, kW090_180 = 1, kW180_290 = 2, kGt290 = 3, kUnknown = 4 };

inline constexpr std::array<WidthCategory, 4> kKnownCategories{WidthCategory::kLt090, WidthCategory::kW090_180,
                                                               WidthCategory::kW180_290, WidthCategory::kGt290};

inline int rank(WidthCategory c) { return static_cast<int>(c); }

inline const char* category_name(WidthCategory c) {
  switch (c) {
    case WidthCategory::kLt090: return "<0.9";
    case WidthCategory::kW090_180: return "0.9-1.8";
    case WidthCategory::kW180_290: return "1.8-2.9";
    case WidthCategory::kGt290: return ">2.9";
    case WidthCategory::kUnknown: return "unknown";
  }
  return "unknown";
}

inline WidthCategory parse_category(const std::string& s) {
  for (int i = 0; i <= 4; ++i) {
    if (s == category_name(static_cast<WidthCategory>(i))) return static_cast<WidthCategory>(i);
  }
  throw ValidationError("unknown width category '" + s + "'");
}

/// Closed-lower bins: [0, 0.9), [0.9, 1.8), [1.8, 2.9), [2.9, inf).
inline WidthCategory categorize(double width) {
  if (!(width >= 0.0)) throw ValidationError("categorize: width must be non-negative");
  if (width < 0.9) return WidthCategory::kLt090;
  if (width < 1.8) return WidthCategory::kW090_180;
  if (width < 2.9) return WidthCategory::kW180_290;
  return WidthCategory::kGt290;
}

/// base^(3 - rank): 1 for the widest category, base³ for the narrowest.
inline double penalty(WidthCategory c, double base) {
  if (c == WidthCategory::kUnknown) throw ValidationError("penalty: unknown category has no penalty");
  if (!(base > 1.0) || !std::isfinite(base)) throw ValidationError("penalty: base must be greater than 1");
  double p = 1.0;
  for (int i = rank(c); i < 3; ++i) p *= base;
  return p;
}

struct WidthmapParams {
  double penalty_base = 10.0;
  double snap_tolerance = 0.05;
  double snap_radius = 5.0;
  double buffer_radius = 8.0;

  void validate() const {
    if (!(penalty_base > 1.0) || !std::isfinite(penalty_base)) throw ValidationError("widthmap: penalty_base must be greater than 1");
    for (double v : {snap_tolerance, snap_radius, buffer_radius}) {
      if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError("widthmap: snap and buffer radii must be positive");
    }
  }
};

struct WidthEdge {
  std::size_t a = 0, b = 0;
  double length = 0.0;
  WidthCategory category = WidthCategory::kUnknown;
  double weight = 0.0;
  Polyline geometry;
  std::string segment_id;
};

struct WidthGraph {
  std::vector<Point2> nodes;
  std::vector<WidthEdge> edges;
  std::vector<std::vector<std::size_t>> incident;  // edge ids per node
};

/// One edge per segment with a known width; endpoints closer than
/// `snap_tolerance` share a node. Segments that would become self-loops are
/// dropped. Nodes are numbered in lexicographic order of their positions.
inline WidthGraph build_graph(const std::vector<PathSegment>& segments, double base, double snap_tolerance = 0.05,
                              const std::vector<bool>& width_known = {}) {
  if (!(base > 1.0)) throw ValidationError("build_graph: base must be greater than 1");
  std::vector<std::size_t> used;
  std::vector<Point2> ends;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (!width_known.empty() && !width_known[i]) continue;
    used.push_back(i);
    ends.push_back(segments[i].geometry.front());
    ends.push_back(segments[i].geometry.back());
  }
  std::vector<std::size_t> parent(ends.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  if (!ends.empty()) {
    const GridIndex index(ends, snap_tolerance);
    for (std::size_t i = 0; i < ends.size(); ++i) {
      index.for_each_within(ends[i], snap_tolerance, [&](std::uint32_t j) {
        const std::size_t a = find(i), b = find(j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      });
    }
  }
  std::map<std::size_t, Point2> rep_pos;  // representative point: smallest member
  for (std::size_t i = 0; i < ends.size(); ++i) {
    auto [it, fresh] = rep_pos.emplace(find(i), ends[i]);
    if (!fresh && ends[i] < it->second) it->second = ends[i];
  }
  std::vector<std::pair<Point2, std::size_t>> order;
  for (const auto& [root, p] : rep_pos) order.emplace_back(p, root);
  std::sort(order.begin(), order.end());
  std::map<std::size_t, std::size_t> node_of_root;
  WidthGraph g;
  for (const auto& [p, root] : order) {
    node_of_root[root] = g.nodes.size();
    g.nodes.push_back(p);
  }
  g.incident.resize(g.nodes.size());
  for (std::size_t k = 0; k < used.size(); ++k) {
    const PathSegment& s = segments[used[k]];
    const std::size_t a = node_of_root[find(2 * k)], b = node_of_root[find(2 * k + 1)];
    if (a == b) continue;
    const WidthCategory c = categorize(s.min_width);
    const double len = s.geometry.length();
    g.incident[a].push_back(g.edges.size());
    g.incident[b].push_back(g.edges.size());
    g.edges.push_back({a, b, len, c, len * penalty(c, base), s.geometry, s.id});
  }
  return g;
}

struct Route {
  std::vector<std::size_t> nodes;  // start ... goal
  std::vector<std::size_t> edges;
  double weight = 0.0;
};

namespace detail {

inline std::vector<double> dijkstra(const WidthGraph& g, std::size_t source, const std::vector<bool>& allowed) {
  std::vector<double> dist(g.nodes.size(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[source] = 0.0;
  pq.emplace(0.0, source);
  while (!pq.empty()) {
    const auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u]) continue;
    for (std::size_t e : g.incident[u]) {
      const WidthEdge& edge = g.edges[e];
      const std::size_t v = edge.a == u ? edge.b : edge.a;
      if (!allowed[v]) continue;
      const double nd = d + edge.weight;
      if (nd < dist[v]) {
        dist[v] = nd;
        pq.emplace(nd, v);
      }
    }
  }
  return dist;
}

}  // namespace detail

/// Minimum-weight path using only allowed nodes; among equal-weight paths the
/// lexicographically smallest node sequence wins. nullopt when unreachable.
inline std::optional<Route> shortest_route(const WidthGraph& g, std::size_t start, std::size_t goal,
                                           const std::vector<bool>& allowed) {
  if (start >= g.nodes.size() || goal >= g.nodes.size() || allowed.size() != g.nodes.size() || !allowed[start] ||
      !allowed[goal]) {
    throw ValidationError("shortest_route: start and goal must be allowed graph nodes");
  }
  if (start == goal) return Route{{start}, {}, 0.0};
  const auto ds = detail::dijkstra(g, start, allowed);
  if (!std::isfinite(ds[goal])) return std::nullopt;
  const auto dg = detail::dijkstra(g, goal, allowed);
  const double total = ds[goal];
  const double tol = 1e-12 * total;

  Route r{{start}, {}, 0.0};
  std::size_t u = start;
  while (u != goal) {
    std::size_t best_v = g.nodes.size(), best_e = 0;
    for (std::size_t e : g.incident[u]) {
      const WidthEdge& edge = g.edges[e];
      const std::size_t v = edge.a == u ? edge.b : edge.a;
      if (!allowed[v] || !(ds[v] > ds[u])) continue;
      if (std::abs(ds[u] + edge.weight + dg[v] - total) > tol) continue;
      if (v < best_v || (v == best_v && edge.weight < g.edges[best_e].weight)) {
        best_v = v;
        best_e = e;
      }
    }
    if (best_v == g.nodes.size()) throw Error("shortest_route: inconsistent distances");
    r.nodes.push_back(best_v);
    r.edges.push_back(best_e);
    r.weight += g.edges[best_e].weight;
    u = best_v;
  }
  return r;
}

struct MajorPathRecord {
  std::string id;
  Polyline geometry;
  WidthCategory full_width_category = WidthCategory::kUnknown;
  WidthCategory free_width_category = WidthCategory::kUnknown;
  double full_width_m = 0.0;
  std::vector<std::size_t> route_node_ids;

  double length() const { return geometry.length(); }
};

/// Lowest category along the best detailed route between the graph nodes
/// nearest to each major segment's endpoints. Only nodes within
/// buffer_radius of the segment and inside `sidewalk` take part. The free
/// category never exceeds the full one.
inline std::vector<MajorPathRecord> map_to_major(const std::vector<PathSegment>& major, const WidthGraph& graph,
                                                 const MultiPolygon& sidewalk, const WidthmapParams& params) {
  params.validate();
  std::vector<MajorPathRecord> out;
  for (const PathSegment& seg : major) {
    MajorPathRecord rec{seg.id, seg.geometry, categorize(seg.min_width), WidthCategory::kUnknown, seg.min_width, {}};
    std::vector<bool> allowed(graph.nodes.size(), false);
    for (std::size_t n = 0; n < graph.nodes.size(); ++n) {
      allowed[n] = distance_to_polyline(graph.nodes[n], seg.geometry) <= params.buffer_radius &&
                   point_in_polygon(graph.nodes[n], sidewalk);
    }
    auto nearest = [&](Point2 p) -> std::optional<std::size_t> {
      std::optional<std::size_t> best;
      double best_d = params.snap_radius;
      for (std::size_t n = 0; n < graph.nodes.size(); ++n) {
        const double d = distance(graph.nodes[n], p);
        if (allowed[n] && d <= best_d && (!best || d < best_d)) {
          best = n;
          best_d = d;
        }
      }
      return best;
    };
    const auto start = nearest(seg.geometry.front());
    const auto goal = nearest(seg.geometry.back());
    if (start && goal) {
      if (*start != *goal) {
        if (const auto route = shortest_route(graph, *start, *goal, allowed)) {
          WidthCategory worst = WidthCategory::kGt290;
          for (std::size_t e : route->edges) worst = std::min(worst, graph.edges[e].category);
          rec.free_width_category = worst;
          rec.route_node_ids = route->nodes;
        }
      } else {
        // Both ends snap to one node: use the allowed edge closest to the middle.
        const Point2 mid = detail::split_equal(seg.geometry.vertices(), 2).front().back();
        std::optional<std::size_t> best;
        double best_d = params.snap_radius;
        for (std::size_t e = 0; e < graph.edges.size(); ++e) {
          const WidthEdge& edge = graph.edges[e];
          if (!allowed[edge.a] || !allowed[edge.b]) continue;
          const double d = distance_to_polyline(mid, edge.geometry);
          if (d <= best_d && (!best || d < best_d)) {
            best = e;
            best_d = d;
          }
        }
        if (best) {
          rec.free_width_category = graph.edges[*best].category;
          rec.route_node_ids = {graph.edges[*best].a, graph.edges[*best].b};
        }
      }
    }
    if (rec.free_width_category != WidthCategory::kUnknown) {
      rec.free_width_category = std::min(rec.free_width_category, rec.full_width_category);
    }
    out.push_back(std::move(rec));
  }
  return out;
}

struct WidthStats {
  std::array<std::array<double, 5>, 4> table_m{};  // [full][free], metres
  double total_m = 0.0;
  double known_m = 0.0;                            // free category known
  std::array<double, 4> full_pct{};                // over records with known free category
  std::array<double, 4> free_pct{};                // over records with known free category
  std::array<double, 4> full_pct_all{};            // over all records
  double unknown_pct = 0.0;                        // share of total length
  std::array<std::array<double, 4>, 4> full_given_free_pct{};  // [free][full]
  std::size_t record_count = 0;
};

/// Length-weighted cross-table and shares. Throws on empty input.
inline WidthStats compare_stats(const std::vector<MajorPathRecord>& records) {
  if (records.empty()) throw ValidationError("compare_stats: no records");
  WidthStats s;
  s.record_count = records.size();
  for (const auto& r : records) {
    if (r.full_width_category == WidthCategory::kUnknown) throw ValidationError("compare_stats: record '" + r.id + "' has no full width");
    s.table_m[rank(r.full_width_category)][rank(r.free_width_category)] += r.length();
  }
  std::array<double, 4> full_known{}, free_known{}, full_all{};
  for (int f = 0; f < 4; ++f) {
    for (int g = 0; g < 5; ++g) {
      s.total_m += s.table_m[f][g];
      full_all[f] += s.table_m[f][g];
      if (g < 4) {
        s.known_m += s.table_m[f][g];
        full_known[f] += s.table_m[f][g];
        free_known[g] += s.table_m[f][g];
      }
    }
  }
  auto pct = [](double part, double whole) { return whole > 0.0 ? 100.0 * part / whole : 0.0; };
  for (int c = 0; c < 4; ++c) {
    s.full_pct[c] = pct(full_known[c], s.known_m);
    s.free_pct[c] = pct(free_known[c], s.known_m);
    s.full_pct_all[c] = pct(full_all[c], s.total_m);
    for (int f = 0; f < 4; ++f) s.full_given_free_pct[c][f] = pct(s.table_m[f][c], free_known[c]);
  }
  double unknown = 0.0;
  for (int f = 0; f < 4; ++f) unknown += s.table_m[f][4];
  s.unknown_pct = pct(unknown, s.total_m);
  return s;
}

inline std::string stats_to_text(const WidthStats& s) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "major path segments: %zu, total length %.3f m, width known %.3f m (%.2f%%)\n\n",
                s.record_count, s.total_m, s.known_m, s.total_m > 0 ? 100.0 * s.known_m / s.total_m : 0.0);
  out += buf;
  out += "length (m), full width (rows) by obstacle-free width (columns)\n";
  std::snprintf(buf, sizeof buf, "%-10s", "full\\free");
  out += buf;
  for (int g = 0; g < 5; ++g) {
    std::snprintf(buf, sizeof buf, "%12s", category_name(static_cast<WidthCategory>(g)));
    out += buf;
  }
  out += "\n";
  for (int f = 0; f < 4; ++f) {
    std::snprintf(buf, sizeof buf, "%-10s", category_name(static_cast<WidthCategory>(f)));
    out += buf;
    for (int g = 0; g < 5; ++g) {
      std::snprintf(buf, sizeof buf, "%12.3f", s.table_m[f][g]);
      out += buf;
    }
    out += "\n";
  }
  out += "\nshare of length with known obstacle-free width (%)\n";
  std::snprintf(buf, sizeof buf, "%-10s%12s%12s\n", "category", "full", "free");
  out += buf;
  for (int c = 0; c < 4; ++c) {
    std::snprintf(buf, sizeof buf, "%-10s%12.2f%12.2f\n", category_name(static_cast<WidthCategory>(c)), s.full_pct[c],
                  s.free_pct[c]);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "\nunknown obstacle-free width: %.2f%% of length\n", s.unknown_pct);
  out += buf;
  out += "\nfull width given obstacle-free width (%)\n";
  std::snprintf(buf, sizeof buf, "%-10s", "free\\full");
  out += buf;
  for (int f = 0; f < 4; ++f) {
    std::snprintf(buf, sizeof buf, "%12s", category_name(static_cast<WidthCategory>(f)));
    out += buf;
  }
  out += "\n";
  for (int g = 0; g < 4; ++g) {
    std::snprintf(buf, sizeof buf, "%-10s", category_name(static_cast<WidthCategory>(g)));
    out += buf;
    for (int f = 0; f < 4; ++f) {
      std::snprintf(buf, sizeof buf, "%12.2f", s.full_given_free_pct[g][f]);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

inline nlohmann::ordered_json stats_to_json(const WidthStats& s) {
  using J = nlohmann::ordered_json;
  J table = J::object();
  for (int f = 0; f < 4; ++f) {
    J row = J::object();
    for (int g = 0; g < 5; ++g) row[category_name(static_cast<WidthCategory>(g))] = s.table_m[f][g];
    table[category_name(static_cast<WidthCategory>(f))] = row;
  }
  auto shares = [](const std::array<double, 4>& v) {
    J o = J::object();
    for (int c = 0; c < 4; ++c) o[category_name(static_cast<WidthCategory>(c))] = v[c];
    return o;
  };
  J conditional = J::object();
  for (int g = 0; g < 4; ++g) conditional[category_name(static_cast<WidthCategory>(g))] = shares(s.full_given_free_pct[g]);
  return J{{"record_count", s.record_count},
           {"total_length_m", s.total_m},
           {"known_length_m", s.known_m},
           {"length_m", table},
           {"full_pct", shares(s.full_pct)},
           {"free_pct", shares(s.free_pct)},
           {"full_pct_all", shares(s.full_pct_all)},
           {"unknown_pct", s.unknown_pct},
           {"full_given_free_pct", conditional}};
}

}  // namespace sidewalk
