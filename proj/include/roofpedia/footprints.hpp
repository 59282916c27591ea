#pragma once

#include "roofpedia/geometry.hpp"

#include <json.hpp>

#include <filesystem>
#include <istream>
#include <memory>
#include <string>
#include <vector>

namespace roofpedia::footprints {

using geometry::GeoBBox;
using geometry::GeoPoint;
using geometry::GeoPolygon;

struct BuildingFootprint {
    std::string id;
    /// Source feature id; differs from id only for MultiPolygon parts ("<parent>#<k>").
    std::string parent_id;
    GeoPolygon geometry;
    double area_m2 = 0.0;
    GeoPoint centroid;
    bool green = false;
    bool solar = false;
    /// Source properties, passed through to the exported registry.
    nlohmann::json properties = nlohmann::json::object();
};

struct LoadResult {
    std::vector<BuildingFootprint> footprints;
    std::size_t features_read = 0;
    std::vector<std::string> warnings;
};

/// Reads a GeoJSON FeatureCollection. Degenerate, self-intersecting and non-polygon
/// features are skipped with a warning; malformed JSON throws DataError.
LoadResult load_footprints(std::istream& in, const std::string& source = "footprints");
LoadResult load_footprints(const std::filesystem::path& path);
LoadResult load_footprints(const nlohmann::json& doc);

/// FNV-1a over the coordinate bit patterns, used for features without an id.
std::string content_hash_id(const nlohmann::json& coordinates);

/// Immutable bulk-loaded R-tree over footprint bounding boxes. Copies share the tree.
class SpatialIndex {
public:
    SpatialIndex() = default;

    /// Indices of footprints whose bbox touches `bbox`, ascending.
    std::vector<std::size_t> query(const GeoBBox& bbox) const;
    std::size_t size() const;

    friend SpatialIndex build_spatial_index(const std::vector<BuildingFootprint>& fps);

private:
    struct Tree;
    std::shared_ptr<const Tree> tree_;
};

/// Throws DomainError for an empty list.
SpatialIndex build_spatial_index(const std::vector<BuildingFootprint>& fps);

std::vector<std::size_t> query_candidates(const SpatialIndex& ix, const GeoBBox& bbox);

} // namespace roofpedia::footprints
