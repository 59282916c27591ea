#pragma once

#include "roofpedia/footprints.hpp"
#include "roofpedia/typology.hpp"
#include "roofpedia/vectorize.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace roofpedia::tagging {

using footprints::BuildingFootprint;
using vectorize::PredictionPolygon;

/// Thresholds that separate a real roof feature from an insignificant or irregular one.
struct TaggingParams {
    double min_overlap_m2 = 2.0;
    double min_overlap_ratio = 0.05; // overlap / prediction area
    double min_compactness = 0.1;    // 4*pi*A/P^2 of the prediction
};

void validate(const TaggingParams& params);

struct TypologyTotals {
    std::int64_t count = 0;
    double area_m2 = 0.0;

    bool operator==(const TypologyTotals&) const = default;
};

/// City-level totals. A typology that was not processed is nullopt.
struct CitySummary {
    std::string city;
    std::int64_t buildings = 0;
    double total_area_m2 = 0.0;
    std::optional<TypologyTotals> green;
    std::optional<TypologyTotals> solar;

    const std::optional<TypologyTotals>& totals(Typology t) const { return t == Typology::Green ? green : solar; }
    bool operator==(const CitySummary&) const = default;
};

struct CityRegistry {
    std::string city;
    std::vector<BuildingFootprint> footprints;
    CitySummary summary;
};

/// Recomputes the summary from the footprint labels. Buildings are counted once per
/// parent id; areas are summed over parts (whole-footprint accounting).
void recompute_totals(CityRegistry& registry, bool green_processed = true, bool solar_processed = true);

/// Overlap area, overlap ratio and prediction compactness all clear their thresholds.
bool significant_overlap(const PredictionPolygon& p, const BuildingFootprint& b, const TaggingParams& params);

struct TaggingReport {
    std::size_t predictions = 0;
    std::size_t without_footprint = 0; // intersect no building: removed
    std::size_t insignificant = 0;     // intersect a building but never significantly
};

/// Labels footprints from predictions via the spatial index, prediction-parallel on
/// `workers` threads. Output is independent of the worker count.
CityRegistry tag_buildings(const std::string& city, std::vector<BuildingFootprint> fps,
                           const footprints::SpatialIndex& index, const std::vector<PredictionPolygon>& predictions,
                           const TaggingParams& params, int workers, TaggingReport* report = nullptr,
                           bool green_processed = true, bool solar_processed = true);

/// Serial O(n*m) reference: every prediction against every footprint, no index.
CityRegistry tag_buildings_reference(const std::string& city, std::vector<BuildingFootprint> fps,
                                     const std::vector<PredictionPolygon>& predictions, const TaggingParams& params,
                                     bool green_processed = true, bool solar_processed = true);

inline constexpr const char* kRegistryPolygons = "registry.geojson";
inline constexpr const char* kRegistryCentroids = "registry_centroids.geojson";
inline constexpr const char* kRegistrySummary = "summary.json";

nlohmann::json summary_to_json(const CitySummary& s);
CitySummary summary_from_json(const nlohmann::json& doc);

nlohmann::json registry_polygons_json(const CityRegistry& r);
nlohmann::json registry_centroids_json(const CityRegistry& r);

/// Writes the polygon layer, the centroid layer (tagged buildings only) and the summary.
void export_registry(const CityRegistry& r, const std::filesystem::path& out_dir);

/// Reads a registry polygon layer (as written by export_registry, or a ground-truth file
/// with the same properties). Labels and area_m2 are taken from the properties.
CityRegistry load_registry(const std::filesystem::path& polygons, const std::string& city);
CityRegistry load_registry(const nlohmann::json& doc, const std::string& city);

} // namespace roofpedia::tagging
