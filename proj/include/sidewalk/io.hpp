#pragma once

// Readers and writers for GeoJSON features, point clouds (text and SWPC
// binary) and ESRI ASCII elevation grids.

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "sidewalk/error.hpp"
#include "sidewalk/geom.hpp"

namespace sidewalk {

// ---------------------------------------------------------------------------
// Features

using PropertyValue = std::variant<std::nullptr_t, bool, std::int64_t, double, std::string>;
using Properties = std::map<std::string, PropertyValue>;
using Geometry = std::variant<Point2, Polyline, Polygon, MultiPolygon>;

struct Feature {
  std::optional<std::string> id;
  Geometry geometry;
  Properties properties;
};

struct FeatureCollection {
  std::vector<Feature> features;
};

/// Numeric property as double (accepts integer or floating JSON numbers).
inline std::optional<double> numeric_property(const Properties& props, const std::string& key) {
  const auto it = props.find(key);
  if (it == props.end()) return std::nullopt;
  if (const auto* d = std::get_if<double>(&it->second)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&it->second)) return static_cast<double>(*i);
  return std::nullopt;
}

inline std::optional<std::string> string_property(const Properties& props, const std::string& key) {
  const auto it = props.find(key);
  if (it == props.end()) return std::nullopt;
  if (const auto* s = std::get_if<std::string>(&it->second)) return *s;
  return std::nullopt;
}

namespace detail::geojson {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

inline Point2 parse_position(const Json& j) {
  if (!j.is_array() || j.size() < 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ValidationError("position must be an array of at least two numbers");
  }
  const Point2 p{j[0].get<double>(), j[1].get<double>()};
  if (!is_finite(p)) throw ValidationError("position is not finite");
  return p;
}

inline std::vector<Point2> parse_positions(const Json& j) {
  if (!j.is_array()) throw ValidationError("coordinates must be an array");
  std::vector<Point2> out;
  out.reserve(j.size());
  for (const auto& p : j) out.push_back(parse_position(p));
  return out;
}

inline Polygon parse_polygon(const Json& rings) {
  if (!rings.is_array() || rings.empty()) throw ValidationError("polygon needs at least one ring");
  std::vector<std::vector<Point2>> holes;
  for (std::size_t k = 1; k < rings.size(); ++k) holes.push_back(parse_positions(rings[k]));
  return Polygon(parse_positions(rings[0]), std::move(holes));
}

inline Geometry parse_geometry(const Json& g) {
  if (!g.is_object()) throw ValidationError("geometry must be an object");
  const auto type = g.value("type", std::string{});
  const auto coords = g.find("coordinates");
  if (coords == g.end()) throw ValidationError("geometry has no coordinates");
  if (type == "Point") return parse_position(*coords);
  if (type == "LineString") return Polyline(parse_positions(*coords));
  if (type == "Polygon") return parse_polygon(*coords);
  if (type == "MultiPolygon") {
    if (!coords->is_array()) throw ValidationError("coordinates must be an array");
    MultiPolygon mp;
    for (const auto& p : *coords) mp.parts.push_back(parse_polygon(p));
    return mp;
  }
  throw ValidationError("unsupported geometry type '" + type + "'");
}

inline PropertyValue parse_property(const std::string& key, const Json& v) {
  if (v.is_null()) return nullptr;
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return v.get<std::string>();
  throw ValidationError("property '" + key + "' is not a scalar");
}

inline OrderedJson position_json(Point2 p) { return OrderedJson::array({p.x, p.y}); }

inline OrderedJson ring_json(const Ring& r) {
  auto out = OrderedJson::array();
  for (const auto& p : r) out.push_back(position_json(p));
  out.push_back(position_json(r.front()));
  return out;
}

inline OrderedJson polygon_json(const Polygon& p) {
  auto out = OrderedJson::array();
  out.push_back(ring_json(p.exterior()));
  for (const auto& h : p.holes()) out.push_back(ring_json(h));
  return out;
}

inline OrderedJson geometry_json(const Geometry& g) {
  OrderedJson out;
  std::visit(
      [&](const auto& geom) {
        using T = std::decay_t<decltype(geom)>;
        if constexpr (std::is_same_v<T, Point2>) {
          out["type"] = "Point";
          out["coordinates"] = position_json(geom);
        } else if constexpr (std::is_same_v<T, Polyline>) {
          out["type"] = "LineString";
          auto c = OrderedJson::array();
          for (const auto& p : geom.vertices()) c.push_back(position_json(p));
          out["coordinates"] = std::move(c);
        } else if constexpr (std::is_same_v<T, Polygon>) {
          out["type"] = "Polygon";
          out["coordinates"] = polygon_json(geom);
        } else {
          out["type"] = "MultiPolygon";
          auto c = OrderedJson::array();
          for (const auto& p : geom.parts) c.push_back(polygon_json(p));
          out["coordinates"] = std::move(c);
        }
      },
      g);
  return out;
}

inline OrderedJson property_json(const PropertyValue& v) {
  return std::visit(
      [](const auto& x) -> OrderedJson {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::nullptr_t>) {
          return nullptr;
        } else {
          return x;
        }
      },
      v);
}

}  // namespace detail::geojson

/// Parses a GeoJSON FeatureCollection held in memory.
inline FeatureCollection parse_features(std::string_view text) {
  using detail::geojson::Json;
  Json root;
  try {
    root = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw ParseError("malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what(), e.byte);
  }
  if (!root.is_object() || root.value("type", std::string{}) != "FeatureCollection") {
    throw ValidationError("document is not a GeoJSON FeatureCollection");
  }
  const auto feats = root.find("features");
  if (feats == root.end() || !feats->is_array()) throw ValidationError("FeatureCollection has no features array");

  FeatureCollection out;
  out.features.reserve(feats->size());
  for (std::size_t i = 0; i < feats->size(); ++i) {
    const Json& f = (*feats)[i];
    try {
      if (!f.is_object() || f.value("type", std::string{}) != "Feature") {
        throw ValidationError("not a Feature object");
      }
      Feature feat{std::nullopt, detail::geojson::parse_geometry(f.value("geometry", Json{})), {}};
      if (const auto id = f.find("id"); id != f.end() && !id->is_null()) {
        feat.id = id->is_string() ? id->get<std::string>() : id->dump();
      }
      if (const auto props = f.find("properties"); props != f.end() && !props->is_null()) {
        if (!props->is_object()) throw ValidationError("properties must be an object");
        for (const auto& [k, v] : props->items()) feat.properties[k] = detail::geojson::parse_property(k, v);
      }
      out.features.push_back(std::move(feat));
    } catch (const ValidationError& e) {
      throw ValidationError("feature " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline FeatureCollection read_features(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return parse_features(text);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.byte_offset());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

/// Serialises with one feature per line; output is byte-stable for equal input.
inline std::string to_geojson(const FeatureCollection& fc) {
  using detail::geojson::OrderedJson;
  std::string out = "{\"type\":\"FeatureCollection\",\"features\":[";
  for (std::size_t i = 0; i < fc.features.size(); ++i) {
    const Feature& f = fc.features[i];
    OrderedJson j;
    j["type"] = "Feature";
    if (f.id) j["id"] = *f.id;
    j["geometry"] = detail::geojson::geometry_json(f.geometry);
    auto props = OrderedJson::object();
    for (const auto& [k, v] : f.properties) props[k] = detail::geojson::property_json(v);
    j["properties"] = std::move(props);
    out += (i == 0) ? "\n" : ",\n";
    out += j.dump();
  }
  out += fc.features.empty() ? "]}\n" : "\n]}\n";
  return out;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

inline void write_features(const FeatureCollection& fc, const std::filesystem::path& path) {
  write_text_file(path, to_geojson(fc));
}

// ---------------------------------------------------------------------------
// Point clouds

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Point2 xy() const { return {x, y}; }
  friend bool operator==(const Point3&, const Point3&) = default;
};

struct PointCloud {
  std::vector<Point3> points;
  std::string epoch_label = "epoch";

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

inline constexpr std::array<char, 8> kSwpcMagic{'S', 'W', 'P', 'C', '0', '0', '0', '1'};

namespace detail::cloud {

inline std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) return __builtin_bswap64(v);
  return v;
}

inline void check_finite(const Point3& p, std::size_t record) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
    throw ValidationError("point record " + std::to_string(record) + " has a non-finite coordinate");
  }
}

inline std::vector<Point3> parse_binary(std::string_view data) {
  if (data.size() < 16) throw IoError("SWPC header truncated");
  std::uint64_t count = 0;
  std::memcpy(&count, data.data() + 8, 8);
  count = to_little_endian(count);
  std::vector<Point3> pts;
  const std::size_t available = (data.size() - 16) / 24;
  pts.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, available)));
  for (std::uint64_t r = 0; r < count; ++r) {
    if (r >= available) throw IoError("truncated point record " + std::to_string(r + 1) + " of " + std::to_string(count));
    std::array<double, 3> xyz;
    for (int k = 0; k < 3; ++k) {
      std::uint64_t bits = 0;
      std::memcpy(&bits, data.data() + 16 + r * 24 + k * 8, 8);
      xyz[k] = std::bit_cast<double>(to_little_endian(bits));
    }
    Point3 p{xyz[0], xyz[1], xyz[2]};
    check_finite(p, r + 1);
    pts.push_back(p);
  }
  if (data.size() != 16 + count * 24) {
    throw IoError("SWPC file has " + std::to_string(data.size() - 16 - count * 24) + " trailing bytes");
  }
  return pts;
}

inline std::vector<Point3> parse_text(std::string_view data) {
  std::vector<Point3> pts;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < data.size()) {
    std::size_t end = data.find('\n', pos);
    if (end == std::string_view::npos) end = data.size();
    std::string_view line = data.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::array<double, 3> xyz{};
    int fields = 0;
    std::size_t i = 0;
    auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == ','; };
    while (i < line.size()) {
      while (i < line.size() && is_space(line[i])) ++i;
      if (i >= line.size()) break;
      std::size_t j = i;
      while (j < line.size() && !is_space(line[j])) ++j;
      if (fields == 3) throw IoError("line " + std::to_string(line_no) + ": more than 3 fields");
      double v = 0.0;
      const auto token = line.substr(i, j - i);
      const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
      if (res.ec != std::errc{} || res.ptr != token.data() + token.size()) {
        throw IoError("line " + std::to_string(line_no) + ": bad number '" + std::string(token) + "'");
      }
      xyz[fields++] = v;
      i = j;
    }
    if (fields == 0) continue;
    if (fields != 3) throw IoError("line " + std::to_string(line_no) + ": expected 3 fields");
    Point3 p{xyz[0], xyz[1], xyz[2]};
    check_finite(p, pts.size() + 1);
    pts.push_back(p);
  }
  return pts;
}

}  // namespace detail::cloud

/// Reads either container; the epoch label is the file stem.
inline PointCloud read_point_cloud(const std::filesystem::path& path) {
  const std::string data = read_text_file(path);
  PointCloud cloud;
  cloud.epoch_label = path.stem().string();
  if (cloud.epoch_label.empty()) cloud.epoch_label = "epoch";
  const bool binary = data.size() >= 8 && std::memcmp(data.data(), kSwpcMagic.data(), 8) == 0;
  try {
    cloud.points = binary ? detail::cloud::parse_binary(data) : detail::cloud::parse_text(data);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return cloud;
}

inline void write_point_cloud_binary(const PointCloud& cloud, const std::filesystem::path& path) {
  std::string buf(16 + cloud.points.size() * 24, '\0');
  std::memcpy(buf.data(), kSwpcMagic.data(), 8);
  const std::uint64_t count = detail::cloud::to_little_endian(cloud.points.size());
  std::memcpy(buf.data() + 8, &count, 8);
  for (std::size_t r = 0; r < cloud.points.size(); ++r) {
    const auto& p = cloud.points[r];
    const std::array<double, 3> xyz{p.x, p.y, p.z};
    for (int k = 0; k < 3; ++k) {
      const std::uint64_t bits = detail::cloud::to_little_endian(std::bit_cast<std::uint64_t>(xyz[k]));
      std::memcpy(buf.data() + 16 + r * 24 + k * 8, &bits, 8);
    }
  }
  write_text_file(path, buf);
}

inline void write_point_cloud_text(const PointCloud& cloud, const std::filesystem::path& path) {
  std::string out = "# x y z\n";
  char line[128];
  for (const auto& p : cloud.points) {
    std::snprintf(line, sizeof line, "%.17g %.17g %.17g\n", p.x, p.y, p.z);
    out += line;
  }
  write_text_file(path, out);
}

// ---------------------------------------------------------------------------
// Elevation grid

class ElevationGrid {
 public:
  ElevationGrid() = default;

  /// `values` are row-major with row 0 at the top (northern) edge.
  ElevationGrid(Point2 origin, double cell_size, std::size_t ncols, std::size_t nrows, std::vector<double> values,
                double nodata = -9999.0)
      : origin_(origin), cell_size_(cell_size), ncols_(ncols), nrows_(nrows), values_(std::move(values)),
        nodata_(nodata) {
    if (!(cell_size_ > 0.0)) throw ValidationError("elevation grid cell size must be positive");
    if (ncols_ == 0 || nrows_ == 0) throw ValidationError("elevation grid must have at least one cell");
    if (values_.size() != ncols_ * nrows_) {
      throw ValidationError("elevation grid expects " + std::to_string(ncols_ * nrows_) + " values, got " +
                            std::to_string(values_.size()));
    }
  }

  Point2 origin() const { return origin_; }
  double cell_size() const { return cell_size_; }
  std::size_t ncols() const { return ncols_; }
  std::size_t nrows() const { return nrows_; }
  double nodata() const { return nodata_; }
  const std::vector<double>& values() const { return values_; }

  /// Stored value, or nullopt for NODATA.
  std::optional<double> cell(std::size_t col, std::size_t row) const {
    const double v = values_[row * ncols_ + col];
    if (v == nodata_ || !std::isfinite(v)) return std::nullopt;
    return v;
  }

  Point2 cell_center(std::size_t col, std::size_t row) const {
    return {origin_.x + (static_cast<double>(col) + 0.5) * cell_size_,
            origin_.y + (static_cast<double>(nrows_ - row) - 0.5) * cell_size_};
  }

  /// Bilinear interpolation between the four surrounding cell centres.
  /// Outside the grid, or with any NODATA neighbour, the elevation is unknown.
  /// Within half a cell of the edge the lattice is clamped to the border cells.
  std::optional<double> elevation_at(Point2 p) const {
    const double width = static_cast<double>(ncols_) * cell_size_;
    const double height = static_cast<double>(nrows_) * cell_size_;
    if (p.x < origin_.x || p.y < origin_.y || p.x > origin_.x + width || p.y > origin_.y + height) {
      return std::nullopt;
    }
    // Continuous column/row coordinates measured between cell centres; rows count upward.
    const auto [c0, c1, tx] = bracket((p.x - origin_.x) / cell_size_ - 0.5, ncols_);
    const auto [u0, u1, ty] = bracket((p.y - origin_.y) / cell_size_ - 0.5, nrows_);
    const auto row_of = [&](std::size_t up) { return nrows_ - 1 - up; };
    const auto v00 = cell(c0, row_of(u0));
    const auto v10 = cell(c1, row_of(u0));
    const auto v01 = cell(c0, row_of(u1));
    const auto v11 = cell(c1, row_of(u1));
    if (!v00 || !v10 || !v01 || !v11) return std::nullopt;
    if (tx == 0.0 && ty == 0.0) return *v00;
    const double bottom = *v00 * (1.0 - tx) + *v10 * tx;
    const double top = *v01 * (1.0 - tx) + *v11 * tx;
    return bottom * (1.0 - ty) + top * ty;
  }

 private:
  struct Bracket {
    std::size_t lo, hi;
    double t;
  };

  static Bracket bracket(double f, std::size_t n) {
    const double max_index = static_cast<double>(n - 1);
    f = std::clamp(f, 0.0, max_index);
    double lo = std::floor(f);
    double t = f - lo;
    if (t < 1e-12) t = 0.0;
    if (t > 1.0 - 1e-12) {
      lo += 1.0;
      t = 0.0;
    }
    if (lo >= max_index) return {n - 1, n - 1, 0.0};
    const auto l = static_cast<std::size_t>(lo);
    return {l, t == 0.0 ? l : l + 1, t};
  }

  Point2 origin_;
  double cell_size_ = 1.0;
  std::size_t ncols_ = 0;
  std::size_t nrows_ = 0;
  std::vector<double> values_;
  double nodata_ = -9999.0;
};

inline ElevationGrid parse_elevation_grid(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::map<std::string, double> header;
  std::string key;
  std::vector<double> values;
  while (in >> key) {
    std::string lower = key;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    const bool is_header = !lower.empty() && std::isalpha(static_cast<unsigned char>(lower[0])) &&
                           lower != "nan" && lower != "inf";
    if (is_header) {
      if (!values.empty()) throw IoError("header key '" + key + "' after grid values");
      double v = 0.0;
      if (!(in >> v)) throw IoError("header key '" + key + "' has no numeric value");
      header[lower] = v;
      continue;
    }
    double v = 0.0;
    const auto res = std::from_chars(key.data(), key.data() + key.size(), v);
    if (res.ec != std::errc{} || res.ptr != key.data() + key.size()) {
      throw IoError("bad grid value '" + key + "' at position " + std::to_string(values.size() + 1));
    }
    values.push_back(v);
  }
  auto need = [&](const char* k) {
    const auto it = header.find(k);
    if (it == header.end()) throw IoError(std::string("grid header missing '") + k + "'");
    return it->second;
  };
  const auto ncols = static_cast<std::size_t>(need("ncols"));
  const auto nrows = static_cast<std::size_t>(need("nrows"));
  const double cell = need("cellsize");
  Point2 origin;
  if (header.count("xllcorner")) {
    origin = {need("xllcorner"), need("yllcorner")};
  } else {
    origin = {need("xllcenter") - 0.5 * cell, need("yllcenter") - 0.5 * cell};
  }
  const double nodata = header.count("nodata_value") ? header["nodata_value"] : -9999.0;
  if (values.size() != ncols * nrows) {
    throw IoError("grid header declares " + std::to_string(ncols) + "x" + std::to_string(nrows) + " = " +
                  std::to_string(ncols * nrows) + " values, found " + std::to_string(values.size()));
  }
  return ElevationGrid(origin, cell, ncols, nrows, std::move(values), nodata);
}

inline ElevationGrid read_elevation_grid(const std::filesystem::path& path) {
  try {
    return parse_elevation_grid(read_text_file(path));
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

inline void write_elevation_grid(const ElevationGrid& g, const std::filesystem::path& path) {
  std::ostringstream out;
  out.precision(17);
  out << "ncols " << g.ncols() << "\nnrows " << g.nrows() << "\nxllcorner " << g.origin().x << "\nyllcorner "
      << g.origin().y << "\ncellsize " << g.cell_size() << "\nNODATA_value " << g.nodata() << "\n";
  for (std::size_t r = 0; r < g.nrows(); ++r) {
    for (std::size_t c = 0; c < g.ncols(); ++c) out << (c ? " " : "") << g.values()[r * g.ncols() + c];
    out << "\n";
  }
  write_text_file(path, out.str());
}

}  // namespace sidewalk
