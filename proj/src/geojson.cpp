#include "roofpedia/geojson.hpp"

#include "roofpedia/errors.hpp"

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

namespace roofpedia::geojson {

namespace fs = std::filesystem;

json point_to_json(const geometry::GeoPoint& p) { return json::array({p.lon, p.lat}); }

json ring_to_json(const geometry::Ring& ring) {
    json out = json::array();
    for (const auto& p : ring)
        out.push_back(point_to_json(p));
    return out;
}

json polygon_to_json(const geometry::GeoPolygon& poly) {
    json rings = json::array();
    rings.push_back(ring_to_json(poly.exterior));
    for (const auto& hole : poly.holes)
        rings.push_back(ring_to_json(hole));
    return json{{"type", "Polygon"}, {"coordinates", std::move(rings)}};
}

namespace {

geometry::Ring ring_from_json(const json& ring) {
    if (!ring.is_array())
        throw DataError("polygon ring is not an array");
    geometry::Ring out;
    out.reserve(ring.size());
    for (const auto& pos : ring) {
        if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() || !pos[1].is_number())
            throw DataError("invalid position in polygon ring");
        out.push_back(tilegrid::make_point(pos[0].get<double>(), pos[1].get<double>()));
    }
    return out;
}

} // namespace

geometry::GeoPolygon polygon_from_json(const json& coordinates) {
    if (!coordinates.is_array() || coordinates.empty())
        throw DataError("polygon coordinates must be a non-empty array of rings");
    geometry::GeoPolygon poly;
    poly.exterior = ring_from_json(coordinates[0]);
    for (std::size_t i = 1; i < coordinates.size(); ++i)
        poly.holes.push_back(ring_from_json(coordinates[i]));
    return poly;
}

json feature_collection(json features) {
    return json{{"type", "FeatureCollection"}, {"features", std::move(features)}};
}

json parse(std::istream& in, const std::string& what) {
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw DataError("malformed JSON in " + what + ": " + e.what());
    }
}

json read_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path.string() + ": " + std::strerror(errno));
    return parse(in, path.string());
}

void write_file(const fs::path& path, const json& doc) {
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write " + path.string() + ": " + std::strerror(errno));
    out << doc.dump() << '\n';
    if (!out)
        throw IoError("cannot write " + path.string());
}

std::string tile_key(const tilegrid::TileId& t) {
    return std::to_string(t.zoom) + "/" + std::to_string(t.x) + "/" + std::to_string(t.y);
}

tilegrid::TileId parse_tile_key(const std::string& key) {
    tilegrid::TileId t;
    char s1 = 0;
    char s2 = 0;
    std::istringstream in(key);
    if (!(in >> t.zoom >> s1 >> t.x >> s2 >> t.y) || s1 != '/' || s2 != '/')
        throw DataError("invalid tile key: " + key);
    try {
        tilegrid::validate(t);
    } catch (const DomainError& e) {
        throw DataError("invalid tile key " + key + ": " + e.what());
    }
    return t;
}

json predictions_to_json(const std::vector<vectorize::PredictionPolygon>& polys) {
    json features = json::array();
    for (const auto& p : polys) {
        json tiles = json::array();
        for (const auto& t : p.source_tiles)
            tiles.push_back(tile_key(t));
        features.push_back(json{{"type", "Feature"},
                                {"properties",
                                 {{"typology", std::string(to_string(p.typology))},
                                  {"pixel_area", p.pixel_area},
                                  {"geo_area_m2", p.geo_area_m2},
                                  {"source_tiles", std::move(tiles)}}},
                                {"geometry", polygon_to_json(p.geometry)}});
    }
    return feature_collection(std::move(features));
}

std::vector<vectorize::PredictionPolygon> predictions_from_json(const json& doc) {
    if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" || !doc.contains("features") ||
        !doc["features"].is_array())
        throw DataError("prediction layer is not a FeatureCollection");
    std::vector<vectorize::PredictionPolygon> out;
    for (const auto& f : doc["features"]) {
        try {
            const auto& props = f.at("properties");
            const auto typ = parse_typology(props.at("typology").get<std::string>());
            if (!typ)
                throw DataError("unknown typology in prediction layer");
            const auto& geom = f.at("geometry");
            if (geom.at("type") != "Polygon")
                throw DataError("prediction geometry must be a Polygon");
            vectorize::PredictionPolygon p;
            p.typology = *typ;
            p.geometry = polygon_from_json(geom.at("coordinates"));
            p.pixel_area = props.at("pixel_area").get<std::int64_t>();
            p.geo_area_m2 = props.at("geo_area_m2").get<double>();
            for (const auto& key : props.at("source_tiles"))
                p.source_tiles.push_back(parse_tile_key(key.get<std::string>()));
            out.push_back(std::move(p));
        } catch (const json::exception& e) {
            throw DataError(std::string("malformed prediction feature: ") + e.what());
        }
    }
    return out;
}

} // namespace roofpedia::geojson
