#pragma once

#include "roofpedia/geometry.hpp"
#include "roofpedia/vectorize.hpp"

#include <json.hpp>

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

namespace roofpedia::geojson {

using json = nlohmann::json;

json ring_to_json(const geometry::Ring& ring);
/// GeoJSON Polygon geometry object.
json polygon_to_json(const geometry::GeoPolygon& poly);
json point_to_json(const geometry::GeoPoint& p);

/// Parses Polygon "coordinates" without normalizing. Throws DataError on malformed arrays.
geometry::GeoPolygon polygon_from_json(const json& coordinates);

json feature_collection(json features);

/// Throws DataError when the text is not valid JSON.
json parse(std::istream& in, const std::string& what);
json read_file(const std::filesystem::path& path);

/// Compact dump plus trailing newline; bytes depend only on the document.
void write_file(const std::filesystem::path& path, const json& doc);

/// Intermediate prediction layer: properties {typology, pixel_area, geo_area_m2, source_tiles}.
json predictions_to_json(const std::vector<vectorize::PredictionPolygon>& polys);
std::vector<vectorize::PredictionPolygon> predictions_from_json(const json& doc);

std::string tile_key(const tilegrid::TileId& t);
tilegrid::TileId parse_tile_key(const std::string& key);

} // namespace roofpedia::geojson
