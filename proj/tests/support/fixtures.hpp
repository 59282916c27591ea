#pragma once

#include "roofpedia/footprints.hpp"
#include "roofpedia/geojson.hpp"
#include "roofpedia/vectorize.hpp"

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fixture {

using roofpedia::geometry::GeoPoint;
using roofpedia::geometry::GeoPolygon;
using roofpedia::geometry::Ring;

/// Axis-aligned lon/lat rectangle, counter-clockwise and closed.
inline Ring rect_ring(double w, double s, double e, double n) { return {{w, s}, {e, s}, {e, n}, {w, n}, {w, s}}; }

inline GeoPolygon rect(double w, double s, double e, double n) { return GeoPolygon{rect_ring(w, s, e, n), {}}; }

inline nlohmann::json feature(const std::string& id, const GeoPolygon& g, nlohmann::json props = nlohmann::json::object()) {
    return {{"type", "Feature"}, {"id", id}, {"properties", std::move(props)},
            {"geometry", roofpedia::geojson::polygon_to_json(g)}};
}

inline roofpedia::vectorize::PredictionPolygon prediction(roofpedia::Typology t, const GeoPolygon& g) {
    roofpedia::vectorize::PredictionPolygon p;
    p.typology = t;
    p.geometry = g;
    p.geo_area_m2 = roofpedia::geometry::polygon_area_m2(g);
    return p;
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Fresh scratch directory under the system temp directory.
inline std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("roofpedia_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace fixture
