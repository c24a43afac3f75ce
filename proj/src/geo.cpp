#include "civic/geo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "civic/csv.hpp"
#include "civic/parallel.hpp"

namespace civic::geo {

using nlohmann::json;

namespace {

Ring ring_from_json(const json& coords) {
  Ring ring;
  for (const auto& pt : coords) {
    if (!pt.is_array() || pt.size() < 2) throw ConfigError("geojson: bad coordinate pair");
    ring.push_back({pt[0].get<double>(), pt[1].get<double>()});
  }
  if (ring.size() < 3) throw ConfigError("geojson: ring with fewer than 3 points");
  return ring;
}

PolygonShape polygon_from_json(const json& coords) {
  PolygonShape poly;
  for (const auto& ring : coords) poly.rings.push_back(ring_from_json(ring));
  if (poly.rings.empty()) throw ConfigError("geojson: polygon without rings");
  bool first = true;
  for (const auto& ring : poly.rings) {
    for (const auto& p : ring) {
      if (first) {
        poly.min_lon = poly.max_lon = p.lon;
        poly.min_lat = poly.max_lat = p.lat;
        first = false;
      } else {
        poly.min_lon = std::min(poly.min_lon, p.lon);
        poly.max_lon = std::max(poly.max_lon, p.lon);
        poly.min_lat = std::min(poly.min_lat, p.lat);
        poly.max_lat = std::max(poly.max_lat, p.lat);
      }
    }
  }
  return poly;
}

std::string geoid_from_properties(const json& feature) {
  if (!feature.contains("properties") || !feature["properties"].contains("GEOID"))
    throw ConfigError("geojson: feature without properties.GEOID");
  const auto& g = feature["properties"]["GEOID"];
  if (g.is_string()) return g.get<std::string>();
  if (g.is_number_integer()) return std::to_string(g.get<std::int64_t>());
  throw ConfigError("geojson: GEOID must be a string or integer");
}

}  // namespace

std::vector<BlockGroup> load_geojson(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  if (j.value("type", "") != "FeatureCollection")
    throw ConfigError(path + ": expected a FeatureCollection");
  std::vector<BlockGroup> groups;
  for (const auto& feature : j.at("features")) {
    BlockGroup g;
    g.geoid = geoid_from_properties(feature);
    const auto& geom = feature.at("geometry");
    const std::string type = geom.value("type", "");
    const auto& coords = geom.at("coordinates");
    if (type == "Polygon") {
      g.polygons.push_back(polygon_from_json(coords));
    } else if (type == "MultiPolygon") {
      for (const auto& poly : coords) g.polygons.push_back(polygon_from_json(poly));
    } else {
      throw ConfigError(path + ": unsupported geometry type '" + type + "'");
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

namespace {

bool on_segment(const Point& a, const Point& b, double lon, double lat) {
  const double cross = (b.lon - a.lon) * (lat - a.lat) - (b.lat - a.lat) * (lon - a.lon);
  if (cross != 0.0) return false;
  return lon >= std::min(a.lon, b.lon) && lon <= std::max(a.lon, b.lon) &&
         lat >= std::min(a.lat, b.lat) && lat <= std::max(a.lat, b.lat);
}

}  // namespace

bool contains(const PolygonShape& poly, double lon, double lat) {
  if (lon < poly.min_lon || lon > poly.max_lon || lat < poly.min_lat || lat > poly.max_lat)
    return false;
  bool inside = false;
  for (const auto& ring : poly.rings) {
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point& a = ring[i];
      const Point& b = ring[(i + 1) % n];
      if (on_segment(a, b, lon, lat)) return true;  // boundary counts as inside
      if ((a.lat > lat) != (b.lat > lat)) {
        const double x = a.lon + (lat - a.lat) * (b.lon - a.lon) / (b.lat - a.lat);
        if (lon < x) inside = !inside;
      }
    }
  }
  return inside;
}

bool contains(const BlockGroup& group, double lon, double lat) {
  for (const auto& poly : group.polygons)
    if (contains(poly, lon, lat)) return true;
  return false;
}

std::optional<std::string> locate(const std::vector<BlockGroup>& groups, double lat, double lon) {
  for (const auto& g : groups)
    if (contains(g, lon, lat)) return g.geoid;
  return std::nullopt;
}

std::vector<std::optional<std::string>> locate_batch_serial(
    const std::vector<BlockGroup>& groups, const std::vector<ingest::PostRecord>& posts) {
  std::vector<std::optional<std::string>> out(posts.size());
  for (std::size_t i = 0; i < posts.size(); ++i)
    out[i] = locate(groups, posts[i].latitude, posts[i].longitude);
  return out;
}

std::vector<std::optional<std::string>> locate_batch(const std::vector<BlockGroup>& groups,
                                                     const std::vector<ingest::PostRecord>& posts) {
  std::vector<std::optional<std::string>> out(posts.size());
  par::parallel_for(posts.size(), [&](std::size_t i) {
    out[i] = locate(groups, posts[i].latitude, posts[i].longitude);
  });
  return out;
}

std::size_t AttributeTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw ConfigError("attributes: unknown column '" + name + "'");
}

AttributeTable load_attributes_csv(const std::string& path) {
  auto rows = csv::parse_file(path);
  if (rows.empty()) throw ConfigError(path + ": empty file");
  if (rows[0].empty() || rows[0][0] != "geoid")
    throw ConfigError(path + ": first column must be geoid");
  if (rows[0].size() < 2) throw ConfigError(path + ": no attribute columns");
  AttributeTable t;
  t.columns.assign(rows[0].begin() + 1, rows[0].end());
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != rows[0].size())
      throw ConfigError(path + ": row " + std::to_string(r + 1) + " has the wrong width");
    const std::string& geoid = rows[r][0];
    if (geoid.empty()) throw ConfigError(path + ": row " + std::to_string(r + 1) + ": empty geoid");
    std::vector<double> vals;
    for (std::size_t c = 1; c < rows[r].size(); ++c) {
      try {
        vals.push_back(parse_double_strict(rows[r][c]));
      } catch (const ConfigError&) {
        throw ConfigError(path + ": row " + std::to_string(r + 1) + ", column '" +
                          t.columns[c - 1] + "': bad number '" + rows[r][c] + "'");
      }
    }
    if (!t.row_of.emplace(geoid, t.rows.size()).second)
      throw ConfigError(path + ": duplicate geoid '" + geoid + "'");
    t.geoids.push_back(geoid);
    t.rows.push_back(std::move(vals));
  }
  return t;
}

std::pair<std::vector<FusedPost>, std::vector<RecordError>> join_attributes(
    const std::vector<std::optional<std::string>>& geoids, const AttributeTable& table) {
  std::vector<FusedPost> fused(geoids.size());
  std::vector<RecordError> errors;
  for (std::size_t i = 0; i < geoids.size(); ++i) {
    fused[i].geoid = geoids[i];
    if (!geoids[i]) continue;
    auto it = table.row_of.find(*geoids[i]);
    if (it == table.row_of.end())
      errors.push_back({i + 1, "unmatched block group \"" + *geoids[i] + "\""});
    else
      fused[i].attr_row = it->second;
  }
  return {std::move(fused), std::move(errors)};
}

std::string fetch_geoid_remote(const std::string& endpoint, double lat, double lon,
                               const HttpGet& get) {
  char query[96];
  std::snprintf(query, sizeof(query), "?lat=%.10g&lon=%.10g", lat, lon);
  const std::string url = endpoint + query;
  auto [status, body] = get(url);
  if (status == 0) throw StageError("geocoder unreachable: " + url);
  if (status != 200)
    throw StageError("geocoder returned status " + std::to_string(status) + " for " + url);
  try {
    json j = json::parse(body);
    if (!j.contains("geoid") || !j["geoid"].is_string())
      throw StageError("geocoder response missing geoid");
    return j["geoid"].get<std::string>();
  } catch (const json::exception&) {
    throw StageError("geocoder returned a malformed body");
  }
}

}  // namespace civic::geo
