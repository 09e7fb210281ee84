#pragma once

// End-to-end stages: obstacle extraction, width computation and statistics,
// driven by a JSON configuration.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "sidewalk/boolean.hpp"
#include "sidewalk/centerline.hpp"
#include "sidewalk/changedet.hpp"
#include "sidewalk/error.hpp"
#include "sidewalk/ground.hpp"
#include "sidewalk/io.hpp"
#include "sidewalk/obstacles.hpp"
#include "sidewalk/widthmap.hpp"

namespace sidewalk {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Configuration

struct PipelinePaths {
  std::optional<fs::path> sidewalks, cloud_epoch_a, cloud_epoch_b, elevation, trees, containers, terraces;
  fs::path output_dir = "out";
};

struct PipelineConfig {
  PipelinePaths paths;
  BandParams band;
  M3C2Params m3c2;
  ClusterParams cluster;
  CenterlineParams centerline;
  WidthmapParams widthmap;
  double coverage_cell = 1.0;
  unsigned workers = 1;

  void validate() const {
    band.validate();
    m3c2.validate();
    cluster.validate();
    centerline.validate();
    widthmap.validate();
    if (!(coverage_cell > 0.0) || !std::isfinite(coverage_cell)) throw ValidationError("coverage_cell must be positive");
    if (workers == 0) throw ValidationError("workers must be at least 1");
  }
};

namespace detail::config {

using Json = nlohmann::json;

inline void check_keys(const Json& obj, const std::string& section, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ValidationError("config: '" + section + "' must be an object");
  for (const auto& [k, v] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; })) {
      throw ValidationError("config: unknown key '" + (section.empty() ? k : section + "." + k) + "'");
    }
  }
}

template <typename T>
void read(const Json& obj, const char* key, T& out, const std::string& section) {
  const auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, unsigned>) {
      if (!it->is_number_integer() || it->get<long long>() < 0) throw ValidationError("");
      out = static_cast<T>(it->get<long long>());
    } else {
      if (!it->is_number()) throw ValidationError("");
      out = it->get<T>();
    }
  } catch (const std::exception&) {
    throw ValidationError("config: '" + section + "." + key + "' has the wrong type");
  }
}

}  // namespace detail::config

/// Parses a configuration document. Relative paths resolve against `base_dir`.
inline PipelineConfig parse_config(std::string_view text, const fs::path& base_dir) {
  using detail::config::Json;
  using detail::config::read;
  Json root;
  try {
    root = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw ParseError("config: malformed JSON at byte " + std::to_string(e.byte), e.byte);
  }
  detail::config::check_keys(root, "", {"paths", "band", "m3c2", "cluster", "centerline", "widthmap", "coverage_cell", "workers"});
  PipelineConfig c;
  if (const auto p = root.find("paths"); p != root.end()) {
    detail::config::check_keys(*p, "paths", {"sidewalks", "cloud_epoch_a", "cloud_epoch_b", "elevation", "trees",
                                             "containers", "terraces", "output_dir"});
    auto path = [&](const char* key) -> std::optional<fs::path> {
      const auto it = p->find(key);
      if (it == p->end() || it->is_null()) return std::nullopt;
      if (!it->is_string()) throw ValidationError(std::string("config: 'paths.") + key + "' must be a string");
      const fs::path v = it->get<std::string>();
      return v.is_absolute() ? v : base_dir / v;
    };
    c.paths.sidewalks = path("sidewalks");
    c.paths.cloud_epoch_a = path("cloud_epoch_a");
    c.paths.cloud_epoch_b = path("cloud_epoch_b");
    c.paths.elevation = path("elevation");
    c.paths.trees = path("trees");
    c.paths.containers = path("containers");
    c.paths.terraces = path("terraces");
    c.paths.output_dir = path("output_dir").value_or(base_dir / "out");
  } else {
    c.paths.output_dir = base_dir / "out";
  }
  if (const auto s = root.find("band"); s != root.end()) {
    detail::config::check_keys(*s, "band", {"ground_tolerance", "max_height"});
    read(*s, "ground_tolerance", c.band.ground_tolerance, "band");
    read(*s, "max_height", c.band.max_height, "band");
  }
  if (const auto s = root.find("m3c2"); s != root.end()) {
    detail::config::check_keys(*s, "m3c2", {"core_subsample", "normal_radius", "cylinder_radius", "cylinder_halfdepth",
                                            "registration_error", "min_points_per_cylinder", "static_threshold",
                                            "normal_mode"});
    read(*s, "core_subsample", c.m3c2.core_subsample, "m3c2");
    read(*s, "normal_radius", c.m3c2.normal_radius, "m3c2");
    read(*s, "cylinder_radius", c.m3c2.cylinder_radius, "m3c2");
    read(*s, "cylinder_halfdepth", c.m3c2.cylinder_halfdepth, "m3c2");
    read(*s, "registration_error", c.m3c2.registration_error, "m3c2");
    read(*s, "min_points_per_cylinder", c.m3c2.min_points_per_cylinder, "m3c2");
    read(*s, "static_threshold", c.m3c2.static_threshold, "m3c2");
    if (const auto m = s->find("normal_mode"); m != s->end()) {
      const std::string mode = m->is_string() ? m->get<std::string>() : "";
      if (mode == "vertical") {
        c.m3c2.normal_mode = NormalMode::kVertical;
      } else if (mode == "estimated") {
        c.m3c2.normal_mode = NormalMode::kEstimated;
      } else {
        throw ValidationError("config: 'm3c2.normal_mode' must be \"vertical\" or \"estimated\"");
      }
    }
  }
  if (const auto s = root.find("cluster"); s != root.end()) {
    detail::config::check_keys(*s, "cluster", {"eps", "min_points", "hull_alpha", "min_footprint_area"});
    read(*s, "eps", c.cluster.eps, "cluster");
    read(*s, "min_points", c.cluster.min_points, "cluster");
    read(*s, "hull_alpha", c.cluster.hull_alpha, "cluster");
    read(*s, "min_footprint_area", c.cluster.min_footprint_area, "cluster");
  }
  if (const auto s = root.find("centerline"); s != root.end()) {
    detail::config::check_keys(*s, "centerline", {"densify_interval", "simplify_tolerance", "deadend_min_length",
                                                  "max_segment_length", "spur_clearance_factor"});
    read(*s, "densify_interval", c.centerline.densify_interval, "centerline");
    read(*s, "simplify_tolerance", c.centerline.simplify_tolerance, "centerline");
    read(*s, "deadend_min_length", c.centerline.deadend_min_length, "centerline");
    read(*s, "max_segment_length", c.centerline.max_segment_length, "centerline");
    read(*s, "spur_clearance_factor", c.centerline.spur_clearance_factor, "centerline");
  }
  if (const auto s = root.find("widthmap"); s != root.end()) {
    detail::config::check_keys(*s, "widthmap", {"penalty_base", "snap_tolerance", "snap_radius", "buffer_radius"});
    read(*s, "penalty_base", c.widthmap.penalty_base, "widthmap");
    read(*s, "snap_tolerance", c.widthmap.snap_tolerance, "widthmap");
    read(*s, "snap_radius", c.widthmap.snap_radius, "widthmap");
    read(*s, "buffer_radius", c.widthmap.buffer_radius, "widthmap");
  }
  read(root, "coverage_cell", c.coverage_cell, "");
  read(root, "workers", c.workers, "");
  c.validate();
  return c;
}

inline PipelineConfig read_config(const fs::path& path) {
  const std::string text = read_text_file(path);
  try {
    return parse_config(text, path.parent_path());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.byte_offset());
  }
}

// ---------------------------------------------------------------------------
// Logging and scheduling

enum class LogLevel { kDebug, kInfo, kWarning };
using Logger = std::function<void(LogLevel, const std::string&)>;

/// Runs `fn(i)` for i in [0, n) on up to `workers` threads. Exceptions are
/// rethrown for the lowest failing index after all work has stopped.
template <typename Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), n));
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// ---------------------------------------------------------------------------
// Sidewalks

struct Sidewalk {
  std::string id;
  MultiPolygon area;
};

/// Polygon features of the sidewalk layer, sorted by id. The id is the
/// feature id, else the `id` property, else "sw<index>". Other geometry
/// types are reported through `skipped`.
inline std::vector<Sidewalk> load_sidewalks(const FeatureCollection& fc, std::vector<std::string>* skipped = nullptr) {
  std::vector<Sidewalk> out;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < fc.features.size(); ++i) {
    const Feature& f = fc.features[i];
    std::string id = f.id ? *f.id : string_property(f.properties, "id").value_or("sw" + std::to_string(i));
    if (!seen.insert(id).second) throw ValidationError("sidewalks: duplicate id '" + id + "'");
    if (const auto* p = std::get_if<Polygon>(&f.geometry)) {
      out.push_back({std::move(id), MultiPolygon{{*p}}});
    } else if (const auto* mp = std::get_if<MultiPolygon>(&f.geometry)) {
      out.push_back({std::move(id), *mp});
    } else if (skipped) {
      skipped->push_back(id);
    }
  }
  std::sort(out.begin(), out.end(), [](const Sidewalk& a, const Sidewalk& b) { return a.id < b.id; });
  return out;
}

inline BBox bbox_of(const MultiPolygon& mp) {
  BBox b;
  for (const auto& p : mp.parts) b.expand(p.bbox());
  return b;
}

// ---------------------------------------------------------------------------
// Obstacle extraction

/// Cells of side `cell` that hold points from both epochs, merged into
/// row-wise rectangles.
inline MultiPolygon coverage_area(const PointCloud& a, const PointCloud& b, double cell) {
  using Cell = std::pair<std::int64_t, std::int64_t>;  // (row, col)
  auto cells_of = [&](const PointCloud& c) {
    std::set<Cell> s;
    for (const auto& p : c.points) {
      s.insert({static_cast<std::int64_t>(std::floor(p.y / cell)), static_cast<std::int64_t>(std::floor(p.x / cell))});
    }
    return s;
  };
  const auto ca = cells_of(a), cb = cells_of(b);
  std::vector<Cell> both;
  std::set_intersection(ca.begin(), ca.end(), cb.begin(), cb.end(), std::back_inserter(both));
  MultiPolygon out;
  for (std::size_t i = 0; i < both.size();) {
    std::size_t j = i + 1;
    while (j < both.size() && both[j].first == both[i].first && both[j].second == both[j - 1].second + 1) ++j;
    const double y0 = static_cast<double>(both[i].first) * cell;
    const double x0 = static_cast<double>(both[i].second) * cell;
    const double x1 = static_cast<double>(both[j - 1].second + 1) * cell;
    out.parts.push_back(make_rectangle(x0, y0, x1, y0 + cell));
    i = j;
  }
  return out;
}

struct SidewalkObstacles {
  std::vector<ObstacleFootprint> detected;
  MultiPolygon coverage;
  std::size_t clipped_a = 0, clipped_b = 0, band_a = 0, band_b = 0, static_points = 0;
};

inline PointCloud clip_to_area(const PointCloud& cloud, const MultiPolygon& area) {
  PointCloud out;
  out.epoch_label = cloud.epoch_label;
  for (const auto& part : area.parts) {
    const auto c = clip_to_polygon(cloud, part);
    out.points.insert(out.points.end(), c.points.begin(), c.points.end());
  }
  return out;
}

/// clip → height band → change detection → clustering → footprints.
inline SidewalkObstacles extract_sidewalk_obstacles(const Sidewalk& sw, const PointCloud& epoch_a,
                                                    const PointCloud& epoch_b, const ElevationGrid& grid,
                                                    const PipelineConfig& cfg) {
  SidewalkObstacles r;
  const PointCloud ca = clip_to_area(epoch_a, sw.area), cb = clip_to_area(epoch_b, sw.area);
  r.clipped_a = ca.size();
  r.clipped_b = cb.size();
  r.coverage = coverage_area(ca, cb, cfg.coverage_cell);
  const auto band_a = extract_band(ca, grid, cfg.band).obstacle_points;
  const auto band_b = extract_band(cb, grid, cfg.band).obstacle_points;
  r.band_a = band_a.size();
  r.band_b = band_b.size();
  // An empty epoch B leaves no evidence for any point of A.
  if (band_a.empty() || band_b.empty()) return r;
  const PointCloud kept = filter_static(band_a, band_b, cfg.m3c2);
  r.static_points = kept.size();
  r.detected = detect_footprints(kept, cfg.cluster);
  return r;
}

/// Output order is by feature id so that files do not depend on scheduling.
inline void sort_by_id(FeatureCollection& fc) {
  std::stable_sort(fc.features.begin(), fc.features.end(),
                   [](const Feature& a, const Feature& b) { return a.id.value_or("") < b.id.value_or(""); });
}

inline FeatureCollection read_optional_layer(const std::optional<fs::path>& p) {
  return p ? read_features(*p) : FeatureCollection{};
}

inline void require_path(const std::optional<fs::path>& p, const char* key) {
  if (!p) throw ValidationError(std::string("config: 'paths.") + key + "' is required");
  if (!fs::exists(*p)) throw IoError("input '" + p->string() + "' does not exist");
}

/// Writes obstacles.geojson and coverage.geojson to the output directory.
inline void cmd_extract_obstacles(const PipelineConfig& cfg, const Logger& log) {
  cfg.validate();
  if (!cfg.paths.cloud_epoch_a || !cfg.paths.cloud_epoch_b) throw ValidationError("change detection requires two epochs");
  require_path(cfg.paths.sidewalks, "sidewalks");
  require_path(cfg.paths.cloud_epoch_a, "cloud_epoch_a");
  require_path(cfg.paths.cloud_epoch_b, "cloud_epoch_b");
  require_path(cfg.paths.elevation, "elevation");
  for (const auto& p : {cfg.paths.trees, cfg.paths.containers, cfg.paths.terraces}) {
    if (p && !fs::exists(*p)) throw IoError("input '" + p->string() + "' does not exist");
  }

  std::vector<std::string> skipped;
  const auto sidewalks = load_sidewalks(read_features(*cfg.paths.sidewalks), &skipped);
  if (!skipped.empty()) {
    std::string ids;
    for (const auto& s : skipped) ids += (ids.empty() ? "" : ", ") + s;
    log(LogLevel::kWarning, "skipping non-polygon sidewalk features: " + ids);
  }
  const PointCloud epoch_a = read_point_cloud(*cfg.paths.cloud_epoch_a);
  const PointCloud epoch_b = read_point_cloud(*cfg.paths.cloud_epoch_b);
  const ElevationGrid grid = read_elevation_grid(*cfg.paths.elevation);
  const auto registry = registry_footprints(read_optional_layer(cfg.paths.trees),
                                            read_optional_layer(cfg.paths.containers),
                                            read_optional_layer(cfg.paths.terraces));
  log(LogLevel::kInfo, "loaded " + std::to_string(sidewalks.size()) + " sidewalks, epoch A " +
                           std::to_string(epoch_a.size()) + " points, epoch B " + std::to_string(epoch_b.size()) +
                           " points, " + std::to_string(registry.size()) + " registry obstacles");

  std::vector<SidewalkObstacles> results(sidewalks.size());
  parallel_for(sidewalks.size(), cfg.workers, [&](std::size_t i) {
    results[i] = extract_sidewalk_obstacles(sidewalks[i], epoch_a, epoch_b, grid, cfg);
  });

  FeatureCollection obstacles, coverage;
  for (std::size_t i = 0; i < sidewalks.size(); ++i) {
    const auto& r = results[i];
    const std::string& sid = sidewalks[i].id;
    log(LogLevel::kInfo, "sidewalk " + sid + ": clipped " + std::to_string(r.clipped_a) + "/" +
                             std::to_string(r.clipped_b) + ", band " + std::to_string(r.band_a) + "/" +
                             std::to_string(r.band_b) + ", static " + std::to_string(r.static_points) +
                             ", footprints " + std::to_string(r.detected.size()));
    for (std::size_t k = 0; k < r.detected.size(); ++k) {
      obstacles.features.push_back({sid + ":O" + std::to_string(k), r.detected[k].footprint,
                                    {{"source", std::string("detected")}, {"sidewalk_id", sid}}});
    }
    coverage.features.push_back({sid, r.coverage, {{"sidewalk_id", sid}}});
  }
  const char* layers[] = {"tree", "container", "terrace"};
  std::map<ObstacleSource, std::size_t> counters;
  for (const auto& fp : registry) {
    const std::size_t k = counters[fp.source]++;
    obstacles.features.push_back({std::string(layers[static_cast<int>(fp.source) - 1]) + ":" + std::to_string(k),
                                  fp.footprint, {{"source", std::string(source_name(fp.source))}}});
  }
  sort_by_id(obstacles);
  sort_by_id(coverage);
  fs::create_directories(cfg.paths.output_dir);
  write_features(obstacles, cfg.paths.output_dir / "obstacles.geojson");
  write_features(coverage, cfg.paths.output_dir / "coverage.geojson");
  log(LogLevel::kInfo, "wrote " + std::to_string(obstacles.features.size()) + " obstacle footprints");
}

// ---------------------------------------------------------------------------
// Width computation

struct SidewalkWidths {
  std::vector<PathSegment> major;
  std::vector<PathSegment> detailed;
  std::vector<bool> detailed_known;
  std::vector<MajorPathRecord> records;
};

/// Share of a segment's samples inside `coverage`.
inline double covered_fraction(const Polyline& line, const MultiPolygon& coverage, double interval) {
  const auto pts = densify_polyline(line, interval);
  std::size_t inside = 0;
  for (const Point2 p : pts) {
    for (const auto& part : coverage.parts) {
      if (part.bbox().contains(p) && point_in_polygon(p, part)) {
        ++inside;
        break;
      }
    }
  }
  return static_cast<double>(inside) / static_cast<double>(pts.size());
}

/// Major segments on the full polygon, detailed segments on the polygon minus
/// obstacles, and their mapping. Without `coverage` every detailed segment
/// counts as scanned.
inline SidewalkWidths compute_sidewalk_widths(const Sidewalk& sw, const std::vector<Polygon>& obstacles,
                                              const MultiPolygon* coverage, const PipelineConfig& cfg) {
  SidewalkWidths r;
  r.major = centerline_segments(sw.area, cfg.centerline, sw.id + ":M");
  const BBox box = bbox_of(sw.area);
  MultiPolygon relevant;
  for (const auto& o : obstacles) {
    if (o.bbox().intersects(box)) relevant.parts.push_back(o);
  }
  MultiPolygon free_area;
  for (const auto& part : sw.area.parts) {
    for (auto& p : polygon_difference(part, relevant).parts) free_area.parts.push_back(std::move(p));
  }
  r.detailed = centerline_segments(free_area, cfg.centerline, sw.id + ":D");
  r.detailed_known.assign(r.detailed.size(), true);
  if (coverage) {
    for (std::size_t i = 0; i < r.detailed.size(); ++i) {
      r.detailed_known[i] = covered_fraction(r.detailed[i].geometry, *coverage, cfg.centerline.densify_interval) >= 0.5;
    }
  }
  const WidthGraph graph =
      build_graph(r.detailed, cfg.widthmap.penalty_base, cfg.widthmap.snap_tolerance, r.detailed_known);
  r.records = map_to_major(r.major, graph, sw.area, cfg.widthmap);
  return r;
}

inline std::string join_ids(const std::vector<std::size_t>& ids) {
  std::string s;
  for (auto i : ids) s += (s.empty() ? "" : " ") + std::to_string(i);
  return s;
}

inline Feature record_feature(const MajorPathRecord& rec, const std::string& sidewalk_id) {
  return {rec.id,
          rec.geometry,
          {{"sidewalk_id", sidewalk_id},
           {"full_width_m", rec.full_width_m},
           {"full_category", std::string(category_name(rec.full_width_category))},
           {"free_category", std::string(category_name(rec.free_width_category))},
           {"length_m", rec.length()},
           {"route_nodes", join_ids(rec.route_node_ids)}}};
}

inline MajorPathRecord record_from_feature(const Feature& f) {
  const auto* line = std::get_if<Polyline>(&f.geometry);
  if (!line) throw ValidationError("record '" + f.id.value_or("?") + "' is not a LineString");
  const auto full = string_property(f.properties, "full_category");
  const auto free = string_property(f.properties, "free_category");
  if (!full || !free) throw ValidationError("record '" + f.id.value_or("?") + "' lacks width categories");
  return {f.id.value_or(""), *line, parse_category(*full), parse_category(*free),
          numeric_property(f.properties, "full_width_m").value_or(0.0), {}};
}

/// Reads obstacles (and coverage when present) from the output directory and
/// writes segments_full, segments_free and major_records.
inline void cmd_compute_widths(const PipelineConfig& cfg, const Logger& log) {
  cfg.validate();
  require_path(cfg.paths.sidewalks, "sidewalks");
  std::vector<std::string> skipped;
  const auto sidewalks = load_sidewalks(read_features(*cfg.paths.sidewalks), &skipped);
  const fs::path obstacles_path = cfg.paths.output_dir / "obstacles.geojson";
  if (!fs::exists(obstacles_path)) throw IoError("'" + obstacles_path.string() + "' not found; run extract-obstacles first");
  std::vector<Polygon> obstacles;
  for (const auto& f : read_features(obstacles_path).features) {
    if (const auto* p = std::get_if<Polygon>(&f.geometry)) {
      obstacles.push_back(*p);
    } else if (const auto* mp = std::get_if<MultiPolygon>(&f.geometry)) {
      obstacles.insert(obstacles.end(), mp->parts.begin(), mp->parts.end());
    }
  }
  std::map<std::string, MultiPolygon> coverage;
  const fs::path coverage_path = cfg.paths.output_dir / "coverage.geojson";
  const bool have_coverage = fs::exists(coverage_path);
  if (have_coverage) {
    for (const auto& f : read_features(coverage_path).features) {
      const auto sid = string_property(f.properties, "sidewalk_id");
      if (!sid) continue;
      if (const auto* mp = std::get_if<MultiPolygon>(&f.geometry)) {
        coverage[*sid] = *mp;
      } else if (const auto* p = std::get_if<Polygon>(&f.geometry)) {
        coverage[*sid] = MultiPolygon{{*p}};
      }
    }
  } else {
    log(LogLevel::kWarning, "no coverage.geojson; treating every sidewalk as fully scanned");
  }

  std::vector<std::optional<SidewalkWidths>> results(sidewalks.size());
  std::vector<std::string> failures(sidewalks.size());
  const MultiPolygon no_coverage;
  parallel_for(sidewalks.size(), cfg.workers, [&](std::size_t i) {
    const auto it = coverage.find(sidewalks[i].id);
    const MultiPolygon* cov = have_coverage ? (it != coverage.end() ? &it->second : &no_coverage) : nullptr;
    try {
      results[i] = compute_sidewalk_widths(sidewalks[i], obstacles, cov, cfg);
    } catch (const ValidationError& e) {
      failures[i] = e.what();
    }
  });

  FeatureCollection full, free, records;
  for (std::size_t i = 0; i < sidewalks.size(); ++i) {
    const std::string& sid = sidewalks[i].id;
    if (!results[i] || results[i]->major.empty()) {
      skipped.push_back(sid);
      if (!failures[i].empty()) log(LogLevel::kDebug, "sidewalk " + sid + ": " + failures[i]);
      continue;
    }
    const auto& r = *results[i];
    std::size_t unknown = 0;
    for (const auto& rec : r.records) unknown += rec.free_width_category == WidthCategory::kUnknown;
    log(LogLevel::kInfo, "sidewalk " + sid + ": " + std::to_string(r.major.size()) + " major, " +
                             std::to_string(r.detailed.size()) + " detailed segments, " + std::to_string(unknown) +
                             " unknown");
    for (const auto& s : r.major) {
      full.features.push_back({s.id, s.geometry, {{"sidewalk_id", sid}, {"min_width_m", s.min_width}}});
    }
    for (std::size_t k = 0; k < r.detailed.size(); ++k) {
      const auto& s = r.detailed[k];
      free.features.push_back({s.id, s.geometry,
                               {{"sidewalk_id", sid}, {"min_width_m", s.min_width}, {"width_known", bool(r.detailed_known[k])}}});
    }
    for (const auto& rec : r.records) records.features.push_back(record_feature(rec, sid));
  }
  if (!skipped.empty()) {
    std::string ids;
    for (const auto& s : skipped) ids += (ids.empty() ? "" : ", ") + s;
    log(LogLevel::kWarning, "skipped degenerate sidewalks: " + ids);
  }
  for (auto* fc : {&full, &free, &records}) sort_by_id(*fc);
  fs::create_directories(cfg.paths.output_dir);
  write_features(full, cfg.paths.output_dir / "segments_full.geojson");
  write_features(free, cfg.paths.output_dir / "segments_free.geojson");
  write_features(records, cfg.paths.output_dir / "major_records.geojson");
  log(LogLevel::kInfo, "wrote " + std::to_string(records.features.size()) + " major path records");
}

// ---------------------------------------------------------------------------
// Statistics

/// Writes stats.txt and stats.json next to each other in `output_dir`.
/// With `allow_empty`, an empty record set produces empty statistics.
inline void cmd_stats(const fs::path& records_path, const fs::path& output_dir, const Logger& log,
                      bool allow_empty = false) {
  std::vector<MajorPathRecord> records;
  for (const auto& f : read_features(records_path).features) records.push_back(record_from_feature(f));
  fs::create_directories(output_dir);
  if (records.empty() && allow_empty) {
    write_text_file(output_dir / "stats.txt", "major path segments: 0\n");
    write_text_file(output_dir / "stats.json", "{\"record_count\":0}\n");
    log(LogLevel::kInfo, "no major path records; wrote empty statistics");
    return;
  }
  const WidthStats s = compare_stats(records);
  write_text_file(output_dir / "stats.txt", stats_to_text(s));
  write_text_file(output_dir / "stats.json", stats_to_json(s).dump(2) + "\n");
  log(LogLevel::kInfo, "statistics over " + std::to_string(records.size()) + " records written");
}

inline void cmd_run(const PipelineConfig& cfg, const Logger& log) {
  cmd_extract_obstacles(cfg, log);
  cmd_compute_widths(cfg, log);
  cmd_stats(cfg.paths.output_dir / "major_records.geojson", cfg.paths.output_dir, log, true);
}

}  // namespace sidewalk
