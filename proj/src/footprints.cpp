#include "roofpedia/footprints.hpp"

#include "roofpedia/errors.hpp"
#include "roofpedia/geojson.hpp"

#include "boost_geometry.hpp"

#include <boost/geometry/index/rtree.hpp>

#include <bit>
#include <cstdio>
#include <fstream>
#include <set>
#include <unordered_set>

namespace roofpedia::footprints {

namespace fs = std::filesystem;
using nlohmann::json;
namespace bgi = boost::geometry::index;

namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

void hash_json_numbers(const json& node, std::uint64_t& h) {
    if (node.is_array()) {
        for (const auto& child : node)
            hash_json_numbers(child, h);
        h = (h ^ 0xffu) * kFnvPrime; // array terminator keeps nesting unambiguous
        return;
    }
    if (node.is_number()) {
        const auto bits = std::bit_cast<std::uint64_t>(node.get<double>());
        for (int i = 0; i < 8; ++i)
            h = (h ^ ((bits >> (8 * i)) & 0xffu)) * kFnvPrime;
    }
}

std::string feature_id(const json& feature) {
    auto id_of = [](const json& v) -> std::string {
        if (v.is_string())
            return v.get<std::string>();
        if (v.is_number_integer())
            return std::to_string(v.get<std::int64_t>());
        if (v.is_number())
            return v.dump();
        return {};
    };
    if (feature.contains("id")) {
        if (auto s = id_of(feature["id"]); !s.empty())
            return s;
    }
    if (feature.contains("properties") && feature["properties"].is_object() && feature["properties"].contains("id")) {
        if (auto s = id_of(feature["properties"]["id"]); !s.empty())
            return s;
    }
    return {};
}

} // namespace


std::string content_hash_id(const json& coordinates) {
    std::uint64_t h = kFnvOffset;
    hash_json_numbers(coordinates, h);
    char buf[20];
    std::snprintf(buf, sizeof buf, "h%016llx", static_cast<unsigned long long>(h));
    return buf;
}

LoadResult load_footprints(const json& doc) {
    if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" || !doc.contains("features") ||
        !doc["features"].is_array())
        throw DataError("footprint input is not a GeoJSON FeatureCollection");

    LoadResult result;
    std::unordered_set<std::string> seen;
    for (const auto& feature : doc["features"]) {
        ++result.features_read;
        const std::size_t ordinal = result.features_read - 1;
        auto warn = [&](const std::string& what) {
            result.warnings.push_back("feature " + std::to_string(ordinal) + ": " + what);
        };
        if (!feature.is_object() || !feature.contains("geometry") || !feature["geometry"].is_object()) {
            warn("missing geometry, skipped");
            continue;
        }
        const auto& geom = feature["geometry"];
        const std::string type = geom.value("type", "");
        if ((type != "Polygon" && type != "MultiPolygon") || !geom.contains("coordinates")) {
            warn("non-polygon geometry '" + type + "', skipped");
            continue;
        }
        const auto& coords = geom["coordinates"];
        std::string parent = feature_id(feature);
        if (parent.empty())
            parent = content_hash_id(coords);
        if (!seen.insert(parent).second) {
            warn("duplicate id '" + parent + "', skipped");
            continue;
        }
        json properties = feature.contains("properties") && feature["properties"].is_object()
                              ? feature["properties"]
                              : json::object();

        std::vector<json> parts;
        if (type == "Polygon")
            parts.push_back(coords);
        else if (coords.is_array())
            parts.assign(coords.begin(), coords.end());
        for (std::size_t k = 0; k < parts.size(); ++k) {
            const std::string id = parts.size() > 1 ? parent + "#" + std::to_string(k) : parent;
            GeoPolygon poly;
            try {
                poly = geojson::polygon_from_json(parts[k]);
            } catch (const DataError& e) {
                warn(std::string(e.what()) + ", skipped");
                continue;
            }
            if (!geometry::normalize(poly)) {
                warn("ring with fewer than 3 distinct vertices, skipped");
                continue;
            }
            std::string reason;
            if (!geometry::is_valid(poly, &reason)) {
                warn("invalid polygon (" + reason + "), skipped");
                continue;
            }
            const double area = geometry::polygon_area_m2(poly);
            if (!(area > 0.0)) {
                warn("zero-area polygon, skipped");
                continue;
            }
            BuildingFootprint fp;
            fp.id = id;
            fp.parent_id = parent;
            fp.centroid = geometry::centroid(poly);
            fp.geometry = std::move(poly);
            fp.area_m2 = area;
            fp.properties = properties;
            result.footprints.push_back(std::move(fp));
        }
    }
    return result;
}

LoadResult load_footprints(std::istream& in, const std::string& source) {
    return load_footprints(geojson::parse(in, source));
}

LoadResult load_footprints(const fs::path& path) { return load_footprints(geojson::read_file(path)); }

struct SpatialIndex::Tree {
    using Value = std::pair<geometry::detail::BBox, std::size_t>;
    bgi::rtree<Value, bgi::rstar<16>> rtree;
    std::size_t count = 0;
};

std::vector<std::size_t> SpatialIndex::query(const GeoBBox& bbox) const {
    std::vector<std::size_t> out;
    if (!tree_)
        return out;
    std::vector<Tree::Value> hits;
    tree_->rtree.query(bgi::intersects(geometry::detail::to_boost(bbox)), std::back_inserter(hits));
    out.reserve(hits.size());
    for (const auto& h : hits)
        out.push_back(h.second);
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t SpatialIndex::size() const { return tree_ ? tree_->count : 0; }

SpatialIndex build_spatial_index(const std::vector<BuildingFootprint>& fps) {
    if (fps.empty())
        throw DomainError("cannot build a spatial index over zero footprints");
    std::vector<SpatialIndex::Tree::Value> values;
    values.reserve(fps.size());
    for (std::size_t i = 0; i < fps.size(); ++i)
        values.emplace_back(geometry::detail::to_boost(geometry::bbox(fps[i].geometry)), i);
    auto tree = std::make_shared<SpatialIndex::Tree>();
    // Range constructor bulk-loads (packing), which is deterministic for a given order.
    tree->rtree = decltype(tree->rtree)(values.begin(), values.end());
    tree->count = fps.size();
    SpatialIndex ix;
    ix.tree_ = std::move(tree);
    return ix;
}

std::vector<std::size_t> query_candidates(const SpatialIndex& ix, const GeoBBox& bbox) {
    tilegrid::validate(bbox);
    return ix.query(bbox);
}

} // namespace roofpedia::footprints
