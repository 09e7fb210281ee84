#pragma once

// Two-epoch change detection on projection cylinders (M3C2 style).

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <tuple>
#include <vector>

#include <Eigen/Eigenvalues>

#include "sidewalk/error.hpp"
#include "sidewalk/io.hpp"
#include "sidewalk/spatial.hpp"

namespace sidewalk {

using Vec3 = std::array<double, 3>;

inline double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Vec3 diff3(const Point3& a, const Point3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }

enum class NormalMode { kVertical, kEstimated };

struct M3C2Params {
  double core_subsample = 0.3;
  double normal_radius = 0.5;
  double cylinder_radius = 0.5;
  double cylinder_halfdepth = 2.0;
  double registration_error = 0.02;
  std::size_t min_points_per_cylinder = 4;
  double static_threshold = 0.1;
  NormalMode normal_mode = NormalMode::kVertical;

  void validate() const {
    for (double v : {core_subsample, normal_radius, cylinder_radius, cylinder_halfdepth, static_threshold}) {
      if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError("m3c2: radii, depths and static_threshold must be positive");
    }
    if (!(registration_error >= 0.0) || !std::isfinite(registration_error)) {
      throw ValidationError("m3c2: registration_error must be non-negative");
    }
    if (min_points_per_cylinder < 3) throw ValidationError("m3c2: min_points_per_cylinder must be at least 3");
  }
};

enum class CoreStatus { kStatic, kChanged, kUndetermined };

struct CorePointResult {
  Point3 core;
  Vec3 normal{0.0, 0.0, 1.0};
  double distance = 0.0;
  double lod = 0.0;
  CoreStatus status = CoreStatus::kUndetermined;
  std::size_t count_a = 0;
  std::size_t count_b = 0;
};

/// Point cloud plus an xy grid for neighbourhood queries. Read-only after construction.
class IndexedCloud {
 public:
  IndexedCloud(const PointCloud& cloud, double cell_size) : cloud_(&cloud), index_(xy_of(cloud), cell_size) {}

  const std::vector<Point3>& points() const { return cloud_->points; }
  const GridIndex& index() const { return index_; }

 private:
  static std::vector<Point2> xy_of(const PointCloud& c) {
    std::vector<Point2> out;
    out.reserve(c.size());
    for (const Point3& p : c.points) out.push_back(p.xy());
    return out;
  }

  const PointCloud* cloud_;
  GridIndex index_;
};

/// One representative per occupied cubic cell: the member nearest the mean of
/// the cell's points. Output is ordered by cell index.
inline std::vector<Point3> select_core_points(const PointCloud& cloud, double spacing) {
  if (!(spacing > 0.0)) throw ValidationError("select_core_points: spacing must be positive");
  using Cell = std::tuple<std::int64_t, std::int64_t, std::int64_t>;
  std::map<Cell, std::vector<std::size_t>> cells;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point3& p = cloud.points[i];
    cells[{static_cast<std::int64_t>(std::floor(p.x / spacing)), static_cast<std::int64_t>(std::floor(p.y / spacing)),
           static_cast<std::int64_t>(std::floor(p.z / spacing))}]
        .push_back(i);
  }
  std::vector<Point3> cores;
  cores.reserve(cells.size());
  for (const auto& [cell, members] : cells) {
    Point3 mean{0, 0, 0};
    for (std::size_t i : members) {
      mean.x += cloud.points[i].x;
      mean.y += cloud.points[i].y;
      mean.z += cloud.points[i].z;
    }
    const double n = static_cast<double>(members.size());
    mean = {mean.x / n, mean.y / n, mean.z / n};
    std::size_t best = members.front();
    double best_d = dot3(diff3(cloud.points[best], mean), diff3(cloud.points[best], mean));
    for (std::size_t i : members) {
      const Vec3 d = diff3(cloud.points[i], mean);
      if (dot3(d, d) < best_d) {
        best_d = dot3(d, d);
        best = i;
      }
    }
    cores.push_back(cloud.points[best]);
  }
  return cores;
}

/// Unit normal from the neighbourhood covariance, oriented with z >= 0
/// (then x, then y, for horizontal normals). nullopt when fewer than three
/// neighbours lie within `radius`.
inline std::optional<Vec3> estimate_normal(const Point3& core, const IndexedCloud& cloud, double radius) {
  const auto& pts = cloud.points();
  std::vector<std::uint32_t> nb;
  cloud.index().for_each_within(core.xy(), radius, [&](std::uint32_t i) {
    const Vec3 d = diff3(pts[i], core);
    if (dot3(d, d) <= radius * radius) nb.push_back(i);
  });
  if (nb.size() < 3) return std::nullopt;
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (auto i : nb) mean += Eigen::Vector3d(pts[i].x, pts[i].y, pts[i].z);
  mean /= static_cast<double>(nb.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (auto i : nb) {
    const Eigen::Vector3d d = Eigen::Vector3d(pts[i].x, pts[i].y, pts[i].z) - mean;
    cov += d * d.transpose();
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  if (solver.info() != Eigen::Success) return std::nullopt;
  Eigen::Vector3d n = solver.eigenvectors().col(0).normalized();
  constexpr double kFlat = 1e-12;
  const bool flip = std::abs(n.z()) > kFlat ? n.z() < 0 : (std::abs(n.x()) > kFlat ? n.x() < 0 : n.y() < 0);
  if (flip) n = -n;
  return Vec3{n.x(), n.y(), n.z()};
}

inline std::optional<Vec3> estimate_normal(const Point3& core, const PointCloud& cloud, double radius) {
  const IndexedCloud indexed(cloud, radius);
  return estimate_normal(core, indexed, radius);
}

namespace detail {

struct AxialStats {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  // sample variance, 0 when n < 2
};

inline AxialStats cylinder_stats(const Point3& core, const Vec3& normal, const IndexedCloud& cloud,
                                 const M3C2Params& params) {
  const bool vertical = normal[0] == 0.0 && normal[1] == 0.0;
  const double r = params.cylinder_radius, h = params.cylinder_halfdepth;
  const double query = vertical ? r : std::hypot(r, h);
  std::vector<double> axial;
  const auto& pts = cloud.points();
  cloud.index().for_each_within(core.xy(), query, [&](std::uint32_t i) {
    const Vec3 v = diff3(pts[i], core);
    const double a = dot3(v, normal);
    const Vec3 radial{v[0] - a * normal[0], v[1] - a * normal[1], v[2] - a * normal[2]};
    if (std::abs(a) <= h && dot3(radial, radial) <= r * r) axial.push_back(a);
  });
  AxialStats s;
  s.n = axial.size();
  if (s.n == 0) return s;
  // Summation in a fixed order keeps the result independent of cell layout.
  std::sort(axial.begin(), axial.end());
  double sum = 0.0;
  for (double a : axial) sum += a;
  s.mean = sum / static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double a : axial) ss += (a - s.mean) * (a - s.mean);
    s.variance = ss / static_cast<double>(s.n - 1);
  }
  return s;
}

}  // namespace detail

inline CorePointResult m3c2_distance(const Point3& core, const Vec3& normal, const IndexedCloud& cloud_a,
                                     const IndexedCloud& cloud_b, const M3C2Params& params) {
  const auto a = detail::cylinder_stats(core, normal, cloud_a, params);
  const auto b = detail::cylinder_stats(core, normal, cloud_b, params);
  CorePointResult r;
  r.core = core;
  r.normal = normal;
  r.count_a = a.n;
  r.count_b = b.n;
  const double sa = a.n > 0 ? a.variance / static_cast<double>(a.n) : 0.0;
  const double sb = b.n > 0 ? b.variance / static_cast<double>(b.n) : 0.0;
  r.lod = 1.96 * std::sqrt(sa + sb) + params.registration_error;
  if (a.n < params.min_points_per_cylinder || b.n < params.min_points_per_cylinder) {
    r.status = CoreStatus::kUndetermined;
    r.distance = (a.n > 0 && b.n > 0) ? b.mean - a.mean : 0.0;
    return r;
  }
  r.distance = b.mean - a.mean;
  r.status = std::abs(r.distance) > std::max(r.lod, params.static_threshold) ? CoreStatus::kChanged : CoreStatus::kStatic;
  return r;
}

inline CorePointResult m3c2_distance(const Point3& core, const Vec3& normal, const PointCloud& cloud_a,
                                     const PointCloud& cloud_b, const M3C2Params& params) {
  params.validate();
  const IndexedCloud ia(cloud_a, params.cylinder_radius), ib(cloud_b, params.cylinder_radius);
  return m3c2_distance(core, normal, ia, ib, params);
}

/// Cores of epoch A with their cylinder comparison against epoch B.
inline std::vector<CorePointResult> compare_epochs(const PointCloud& cloud_a, const PointCloud& cloud_b,
                                                   const M3C2Params& params) {
  params.validate();
  const IndexedCloud ia(cloud_a, params.cylinder_radius), ib(cloud_b, params.cylinder_radius);
  std::vector<CorePointResult> out;
  for (const Point3& core : select_core_points(cloud_a, params.core_subsample)) {
    Vec3 normal{0.0, 0.0, 1.0};
    if (params.normal_mode == NormalMode::kEstimated) {
      const auto n = estimate_normal(core, ia, params.normal_radius);
      if (!n) {
        CorePointResult r;
        r.core = core;
        r.lod = params.registration_error;
        out.push_back(r);
        continue;
      }
      normal = *n;
    }
    out.push_back(m3c2_distance(core, normal, ia, ib, params));
  }
  return out;
}

/// Epoch A points whose nearest core (within core_subsample·√3) is STATIC.
inline PointCloud filter_static(const PointCloud& obstacles_a, const PointCloud& obstacles_b,
                                const M3C2Params& params) {
  if (obstacles_a.empty() || obstacles_b.empty()) throw ValidationError("change detection requires two epochs");
  const auto results = compare_epochs(obstacles_a, obstacles_b, params);
  std::vector<Point2> core_xy;
  core_xy.reserve(results.size());
  for (const auto& r : results) core_xy.push_back(r.core.xy());
  const double reach = params.core_subsample * std::sqrt(3.0);
  const GridIndex cores(std::move(core_xy), reach);

  PointCloud out;
  out.epoch_label = obstacles_a.epoch_label;
  for (const Point3& p : obstacles_a.points) {
    std::int64_t best = -1;
    double best_d = reach * reach;
    cores.for_each_within(p.xy(), reach, [&](std::uint32_t i) {
      const Vec3 d = diff3(p, results[i].core);
      const double d2 = dot3(d, d);
      if (d2 < best_d || (d2 == best_d && (best < 0 || i < best))) {
        best_d = d2;
        best = i;
      }
    });
    if (best >= 0 && results[static_cast<std::size_t>(best)].status == CoreStatus::kStatic) out.points.push_back(p);
  }
  return out;
}

}  // namespace sidewalk
