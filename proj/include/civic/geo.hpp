#pragma once

#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "civic/common.hpp"
#include "civic/ingest.hpp"

namespace civic::geo {

struct Point {
  double lon = 0.0;
  double lat = 0.0;
};

using Ring = std::vector<Point>;

// One polygon: exterior ring first, then any holes. With even-odd containment
// the holes subtract themselves without special casing.
struct PolygonShape {
  std::vector<Ring> rings;
  double min_lon = 0.0, min_lat = 0.0, max_lon = 0.0, max_lat = 0.0;  // inclusive bbox
};

struct BlockGroup {
  std::string geoid;
  std::vector<PolygonShape> polygons;  // MultiPolygon features carry several
};

// FeatureCollection of Polygon / MultiPolygon features with properties.GEOID.
std::vector<BlockGroup> load_geojson(const std::string& path);

// Even-odd ray casting over all rings. Points on an edge or vertex count as
// inside. The bbox prescreen is inclusive, so boundary points survive it.
bool contains(const PolygonShape& poly, double lon, double lat);
bool contains(const BlockGroup& group, double lon, double lat);

// First feature (in file order) containing the point wins.
std::optional<std::string> locate(const std::vector<BlockGroup>& groups, double lat, double lon);

std::vector<std::optional<std::string>> locate_batch_serial(
    const std::vector<BlockGroup>& groups, const std::vector<ingest::PostRecord>& posts);
std::vector<std::optional<std::string>> locate_batch(const std::vector<BlockGroup>& groups,
                                                     const std::vector<ingest::PostRecord>& posts);

// ---------------------------------------------------------------------------
// block-group attributes

struct AttributeTable {
  std::vector<std::string> columns;        // numeric columns, geoid excluded
  std::vector<std::string> geoids;         // row order as in the file
  std::vector<std::vector<double>> rows;   // parallel to geoids
  std::unordered_map<std::string, std::size_t> row_of;

  std::size_t column_index(const std::string& name) const;  // throws ConfigError
};

// header: geoid,<numeric columns...>; duplicate geoids are an error.
AttributeTable load_attributes_csv(const std::string& path);

struct FusedPost {
  std::optional<std::string> geoid;      // nullopt: outside every polygon
  std::optional<std::size_t> attr_row;   // nullopt: no geoid, or geoid unmatched
};

// Posts whose geoid is missing from the table are collected as errors
// ("unmatched block group"); `line` is the 1-based post position.
std::pair<std::vector<FusedPost>, std::vector<RecordError>> join_attributes(
    const std::vector<std::optional<std::string>>& geoids, const AttributeTable& table);

// ---------------------------------------------------------------------------
// remote geocoder

// (status, body); status 0 means the request never completed.
using HttpGet = std::function<std::pair<int, std::string>(const std::string& url)>;

// GET {endpoint}?lat={lat}&lon={lon} expecting {"geoid": "..."}.
// Throws StageError on transport failure, non-200 status or a malformed body.
std::string fetch_geoid_remote(const std::string& endpoint, double lat, double lon,
                               const HttpGet& get);

// Same, over an httplib client.
std::string fetch_geoid_remote(const std::string& endpoint, double lat, double lon);

}  // namespace civic::geo
