#pragma once

// Uniform grids for fixed-radius point queries and nearest-boundary queries.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <unordered_map>
#include <vector>

#include "sidewalk/error.hpp"
#include "sidewalk/geom.hpp"

namespace sidewalk {

class GridIndex {
 public:
  GridIndex(std::vector<Point2> points, double cell_size) : points_(std::move(points)), cell_(cell_size) {
    if (!(cell_size > 0.0)) throw ValidationError("grid index: cell size must be positive");
    order_.resize(points_.size());
    std::iota(order_.begin(), order_.end(), 0u);
    std::vector<std::uint64_t> keys(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) keys[i] = key(cell_of(points_[i].x), cell_of(points_[i].y));
    std::stable_sort(order_.begin(), order_.end(), [&](std::uint32_t a, std::uint32_t b) { return keys[a] < keys[b]; });
    for (std::size_t i = 0; i < order_.size();) {
      std::size_t j = i;
      while (j < order_.size() && keys[order_[j]] == keys[order_[i]]) ++j;
      ranges_.emplace(keys[order_[i]], std::pair<std::uint32_t, std::uint32_t>(i, j));
      i = j;
    }
  }

  const std::vector<Point2>& points() const { return points_; }

  /// Calls `fn(index)` for every point within `radius` (inclusive) of `p`,
  /// in ascending index order within each cell.
  template <typename Fn>
  void for_each_within(Point2 p, double radius, Fn&& fn) const {
    const double r2 = radius * radius;
    const std::int64_t cx0 = cell_of(p.x - radius), cx1 = cell_of(p.x + radius);
    const std::int64_t cy0 = cell_of(p.y - radius), cy1 = cell_of(p.y + radius);
    for (std::int64_t cx = cx0; cx <= cx1; ++cx) {
      for (std::int64_t cy = cy0; cy <= cy1; ++cy) {
        const auto it = ranges_.find(key(cx, cy));
        if (it == ranges_.end()) continue;
        for (std::uint32_t k = it->second.first; k < it->second.second; ++k) {
          const std::uint32_t i = order_[k];
          if (squared_distance(points_[i], p) <= r2) fn(i);
        }
      }
    }
  }

  std::vector<std::uint32_t> within(Point2 p, double radius) const {
    std::vector<std::uint32_t> out;
    for_each_within(p, radius, [&](std::uint32_t i) { out.push_back(i); });
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Index of the nearest point within `max_radius`, lowest index on ties; -1 if none.
  std::int64_t nearest(Point2 p, double max_radius) const {
    std::int64_t best = -1;
    double best_d2 = max_radius * max_radius;
    for_each_within(p, max_radius, [&](std::uint32_t i) {
      const double d2 = squared_distance(points_[i], p);
      if (d2 < best_d2 || (d2 == best_d2 && (best < 0 || i < best))) {
        best_d2 = d2;
        best = i;
      }
    });
    return best;
  }

 private:
  std::int64_t cell_of(double v) const {
    const double c = std::floor(v / cell_);
    if (!(std::abs(c) < 2147483647.0)) throw ValidationError("grid index: coordinate out of range");
    return static_cast<std::int64_t>(c);
  }
  static std::uint64_t key(std::int64_t cx, std::int64_t cy) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(cx)) << 32) |
           static_cast<std::uint32_t>(cy);
  }

  std::vector<Point2> points_;
  double cell_;
  std::vector<std::uint32_t> order_;
  std::unordered_map<std::uint64_t, std::pair<std::uint32_t, std::uint32_t>> ranges_;
};

/// Grid over the ring edges of a polygon for nearest-boundary queries.
class SegmentIndex {
 public:
  struct Segment {
    Point2 a, b;
    std::size_t ring = 0;
    std::size_t edge = 0;
  };

  explicit SegmentIndex(const Polygon& poly) {
    double total = 0.0;
    for (std::size_t k = 0; k < poly.ring_count(); ++k) {
      const Ring& r = poly.ring(k);
      for (std::size_t i = 0; i < r.size(); ++i) {
        segments_.push_back({r[i], r[(i + 1) % r.size()], k, i});
        total += distance(r[i], r[(i + 1) % r.size()]);
      }
    }
    box_ = poly.bbox();
    const double w = box_.max_x - box_.min_x, h = box_.max_y - box_.min_y;
    cell_ = std::max({total / static_cast<double>(segments_.size()), std::sqrt(w * h / 4096.0), 1e-9});
    nx_ = static_cast<std::int64_t>(w / cell_) + 1;
    ny_ = static_cast<std::int64_t>(h / cell_) + 1;
    cells_.resize(static_cast<std::size_t>(nx_ * ny_));
    for (std::uint32_t s = 0; s < segments_.size(); ++s) {
      const auto& g = segments_[s];
      const auto [x0, y0] = cell_of(std::min(g.a.x, g.b.x), std::min(g.a.y, g.b.y));
      const auto [x1, y1] = cell_of(std::max(g.a.x, g.b.x), std::max(g.a.y, g.b.y));
      for (auto cx = x0; cx <= x1; ++cx)
        for (auto cy = y0; cy <= y1; ++cy) cells_[static_cast<std::size_t>(cy * nx_ + cx)].push_back(s);
    }
  }

  const std::vector<Segment>& segments() const { return segments_; }

  /// Nearest boundary point; ties resolve to the lowest (ring, edge).
  BoundaryHit nearest(Point2 p) const {
    const double fx = (p.x - box_.min_x) / cell_, fy = (p.y - box_.min_y) / cell_;
    const auto ci = static_cast<std::int64_t>(std::floor(fx)), cj = static_cast<std::int64_t>(std::floor(fy));
    double best_d2 = std::numeric_limits<double>::infinity();
    std::uint32_t best = 0;
    Point2 best_pt;
    auto visit = [&](std::int64_t cx, std::int64_t cy) {
      if (cx < 0 || cy < 0 || cx >= nx_ || cy >= ny_) return;
      for (std::uint32_t s : cells_[static_cast<std::size_t>(cy * nx_ + cx)]) {
        const Point2 c = closest_point_on_segment(p, segments_[s].a, segments_[s].b);
        const double d2 = squared_distance(p, c);
        if (d2 < best_d2 || (d2 == best_d2 && s < best)) {
          best_d2 = d2;
          best = s;
          best_pt = c;
        }
      }
    };
    if (!box_.contains(p, 4.0 * cell_)) {
      for (std::int64_t cy = 0; cy < ny_; ++cy)
        for (std::int64_t cx = 0; cx < nx_; ++cx) visit(cx, cy);
      return {best_pt, std::sqrt(best_d2), segments_[best].ring, segments_[best].edge};
    }
    for (std::int64_t r = 0;; ++r) {
      if (r == 0) {
        visit(ci, cj);
      } else {
        for (std::int64_t d = -r; d <= r; ++d) {
          visit(ci + d, cj - r);
          visit(ci + d, cj + r);
        }
        for (std::int64_t d = -r + 1; d <= r - 1; ++d) {
          visit(ci - r, cj + d);
          visit(ci + r, cj + d);
        }
      }
      // Every cell outside the visited block is at least this far away.
      const double lb = cell_ * std::min({fx - static_cast<double>(ci - r), static_cast<double>(ci + r + 1) - fx,
                                          fy - static_cast<double>(cj - r), static_cast<double>(cj + r + 1) - fy});
      const bool covered = ci - r <= 0 && cj - r <= 0 && ci + r >= nx_ - 1 && cj + r >= ny_ - 1;
      if (covered || (best_d2 < std::numeric_limits<double>::infinity() && best_d2 <= lb * lb)) break;
    }
    return {best_pt, std::sqrt(best_d2), segments_[best].ring, segments_[best].edge};
  }

  double distance_to(Point2 p) const { return nearest(p).distance; }

  /// Calls `fn(segment)` for segments whose cells overlap `box` (a segment may repeat).
  template <typename Fn>
  void for_each_candidate(const BBox& box, Fn&& fn) const {
    const auto [x0, y0] = cell_of(box.min_x, box.min_y);
    const auto [x1, y1] = cell_of(box.max_x, box.max_y);
    for (auto cx = x0; cx <= x1; ++cx)
      for (auto cy = y0; cy <= y1; ++cy)
        for (std::uint32_t s : cells_[static_cast<std::size_t>(cy * nx_ + cx)]) fn(segments_[s]);
  }

 private:
  std::pair<std::int64_t, std::int64_t> cell_of(double x, double y) const {
    auto clampi = [](double v, std::int64_t n) {
      if (!(v > 0.0)) return std::int64_t{0};
      return std::min(static_cast<std::int64_t>(v), n - 1);
    };
    return {clampi((x - box_.min_x) / cell_, nx_), clampi((y - box_.min_y) / cell_, ny_)};
  }

  std::vector<Segment> segments_;
  BBox box_;
  double cell_ = 1.0;
  std::int64_t nx_ = 1, ny_ = 1;
  std::vector<std::vector<std::uint32_t>> cells_;
};

}  // namespace sidewalk
