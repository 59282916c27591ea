#include "roofpedia/tagging.hpp"

#include "roofpedia/errors.hpp"
#include "roofpedia/geojson.hpp"
#include "roofpedia/parallel.hpp"

#include <algorithm>
#include <set>

namespace roofpedia::tagging {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct PreparedPrediction {
    geometry::GeoBBox box;
    double area_m2 = 0.0;
    double compactness = 0.0;
};

bool clears(double overlap_m2, const PreparedPrediction& p, const TaggingParams& params) {
    if (!(overlap_m2 > 0.0) || !(p.area_m2 > 0.0))
        return false;
    return overlap_m2 >= params.min_overlap_m2 && overlap_m2 / p.area_m2 >= params.min_overlap_ratio &&
           p.compactness >= params.min_compactness;
}

PreparedPrediction prepare(const PredictionPolygon& p) {
    return PreparedPrediction{geometry::bbox(p.geometry), p.geo_area_m2, geometry::compactness(p.geometry)};
}

enum class Outcome { NoFootprint, Insignificant, Tagged };

void apply_label(BuildingFootprint& fp, Typology t) {
    if (t == Typology::Green)
        fp.green = true;
    else
        fp.solar = true;
}

CityRegistry assemble(const std::string& city, std::vector<BuildingFootprint> fps, bool green, bool solar) {
    std::sort(fps.begin(), fps.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    CityRegistry r{city, std::move(fps), {}};
    recompute_totals(r, green, solar);
    return r;
}

void tally(TaggingReport* report, const std::vector<Outcome>& outcomes) {
    if (!report)
        return;
    *report = TaggingReport{outcomes.size(), 0, 0};
    for (auto o : outcomes) {
        if (o == Outcome::NoFootprint)
            ++report->without_footprint;
        else if (o == Outcome::Insignificant)
            ++report->insignificant;
    }
}

} // namespace

void validate(const TaggingParams& params) {
    if (!(params.min_overlap_m2 >= 0.0))
        throw DomainError("min_overlap_m2 must be >= 0");
    if (!(params.min_overlap_ratio >= 0.0 && params.min_overlap_ratio <= 1.0))
        throw DomainError("min_overlap_ratio must lie in [0, 1]");
    if (!(params.min_compactness >= 0.0 && params.min_compactness <= 1.0))
        throw DomainError("min_compactness must lie in [0, 1]");
}

void recompute_totals(CityRegistry& registry, bool green_processed, bool solar_processed) {
    CitySummary s;
    s.city = registry.city;
    std::set<std::string> parents, green_parents, solar_parents;
    TypologyTotals green, solar;
    for (const auto& fp : registry.footprints) {
        parents.insert(fp.parent_id);
        s.total_area_m2 += fp.area_m2;
        if (fp.green) {
            green_parents.insert(fp.parent_id);
            green.area_m2 += fp.area_m2;
        }
        if (fp.solar) {
            solar_parents.insert(fp.parent_id);
            solar.area_m2 += fp.area_m2;
        }
    }
    s.buildings = static_cast<std::int64_t>(parents.size());
    green.count = static_cast<std::int64_t>(green_parents.size());
    solar.count = static_cast<std::int64_t>(solar_parents.size());
    if (green_processed)
        s.green = green;
    if (solar_processed)
        s.solar = solar;
    registry.summary = std::move(s);
}

bool significant_overlap(const PredictionPolygon& p, const BuildingFootprint& b, const TaggingParams& params) {
    const double overlap = geometry::intersection_area_m2(p.geometry, b.geometry);
    return clears(overlap, prepare(p), params);
}

CityRegistry tag_buildings(const std::string& city, std::vector<BuildingFootprint> fps,
                           const footprints::SpatialIndex& index, const std::vector<PredictionPolygon>& predictions,
                           const TaggingParams& params, int workers, TaggingReport* report, bool green_processed,
                           bool solar_processed) {
    validate(params);
    if (index.size() != fps.size())
        throw DomainError("spatial index was built over a different footprint list");

    // Each prediction fills its own slot; labels are applied afterwards in prediction order.
    std::vector<std::vector<std::size_t>> hits(predictions.size());
    std::vector<Outcome> outcomes(predictions.size(), Outcome::NoFootprint);
    parallel::for_each_index(predictions.size(), workers, [&](std::size_t i) {
        const auto& p = predictions[i];
        const auto prepared = prepare(p);
        bool touched = false;
        for (auto j : index.query(prepared.box)) {
            const double overlap = geometry::intersection_area_m2(p.geometry, fps[j].geometry);
            if (overlap > 0.0)
                touched = true;
            if (clears(overlap, prepared, params))
                hits[i].push_back(j);
        }
        outcomes[i] = !hits[i].empty() ? Outcome::Tagged : touched ? Outcome::Insignificant : Outcome::NoFootprint;
    });
    for (std::size_t i = 0; i < predictions.size(); ++i)
        for (auto j : hits[i])
            apply_label(fps[j], predictions[i].typology);
    tally(report, outcomes);
    return assemble(city, std::move(fps), green_processed, solar_processed);
}

CityRegistry tag_buildings_reference(const std::string& city, std::vector<BuildingFootprint> fps,
                                     const std::vector<PredictionPolygon>& predictions, const TaggingParams& params,
                                     bool green_processed, bool solar_processed) {
    validate(params);
    for (const auto& p : predictions)
        for (auto& fp : fps)
            if (significant_overlap(p, fp, params))
                apply_label(fp, p.typology);
    return assemble(city, std::move(fps), green_processed, solar_processed);
}

json summary_to_json(const CitySummary& s) {
    auto block = [](const std::optional<TypologyTotals>& t) -> json {
        if (!t)
            return nullptr;
        return json{{"count", t->count}, {"area_m2", t->area_m2}};
    };
    return json{{"city", s.city},
                {"buildings", s.buildings},
                {"total_area_m2", s.total_area_m2},
                {"green", block(s.green)},
                {"solar", block(s.solar)}};
}

CitySummary summary_from_json(const json& doc) {
    try {
        CitySummary s;
        s.city = doc.at("city").get<std::string>();
        s.buildings = doc.at("buildings").get<std::int64_t>();
        s.total_area_m2 = doc.at("total_area_m2").get<double>();
        auto block = [&](const char* key) -> std::optional<TypologyTotals> {
            if (!doc.contains(key) || doc[key].is_null())
                return std::nullopt;
            return TypologyTotals{doc[key].at("count").get<std::int64_t>(), doc[key].at("area_m2").get<double>()};
        };
        s.green = block("green");
        s.solar = block("solar");
        return s;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed city summary: ") + e.what());
    }
}

namespace {

const char* typology_label(const BuildingFootprint& fp) {
    if (fp.green && fp.solar)
        return "both";
    if (fp.green)
        return "green";
    if (fp.solar)
        return "solar";
    return "none";
}

} // namespace

json registry_polygons_json(const CityRegistry& r) {
    json features = json::array();
    for (const auto& fp : r.footprints) {
        json props = fp.properties.is_object() ? fp.properties : json::object();
        props["id"] = fp.id;
        props["parent_id"] = fp.parent_id;
        props["area_m2"] = fp.area_m2;
        props["green"] = fp.green;
        props["solar"] = fp.solar;
        props["typology"] = typology_label(fp);
        features.push_back(json{{"type", "Feature"},
                                {"id", fp.id},
                                {"properties", std::move(props)},
                                {"geometry", geojson::polygon_to_json(fp.geometry)}});
    }
    return geojson::feature_collection(std::move(features));
}

json registry_centroids_json(const CityRegistry& r) {
    json features = json::array();
    for (const auto& fp : r.footprints) {
        if (!fp.green && !fp.solar)
            continue;
        features.push_back(json{{"type", "Feature"},
                                {"id", fp.id},
                                {"properties",
                                 {{"id", fp.id},
                                  {"parent_id", fp.parent_id},
                                  {"area_m2", fp.area_m2},
                                  {"typology", typology_label(fp)}}},
                                {"geometry", {{"type", "Point"}, {"coordinates", geojson::point_to_json(fp.centroid)}}}});
    }
    return geojson::feature_collection(std::move(features));
}

void export_registry(const CityRegistry& r, const fs::path& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec)
        throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
    geojson::write_file(out_dir / kRegistryPolygons, registry_polygons_json(r));
    geojson::write_file(out_dir / kRegistryCentroids, registry_centroids_json(r));
    geojson::write_file(out_dir / kRegistrySummary, summary_to_json(r.summary));
}

CityRegistry load_registry(const json& doc, const std::string& city) {
    if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" || !doc.contains("features") ||
        !doc["features"].is_array())
        throw DataError("registry is not a GeoJSON FeatureCollection");
    CityRegistry r;
    r.city = city;
    std::set<std::string> seen;
    for (const auto& f : doc["features"]) {
        try {
            const auto& props = f.at("properties");
            BuildingFootprint fp;
            if (props.contains("id"))
                fp.id = props["id"].is_string() ? props["id"].get<std::string>() : props["id"].dump();
            else if (f.contains("id"))
                fp.id = f["id"].is_string() ? f["id"].get<std::string>() : f["id"].dump();
            else
                throw DataError("registry feature without id");
            if (!seen.insert(fp.id).second)
                throw DataError("duplicate registry id " + fp.id);
            fp.parent_id = props.value("parent_id", fp.id);
            fp.green = props.value("green", false);
            fp.solar = props.value("solar", false);
            if (f.contains("geometry") && f["geometry"].is_object() && f["geometry"].value("type", "") == "Polygon") {
                fp.geometry = geojson::polygon_from_json(f["geometry"]["coordinates"]);
                geometry::normalize(fp.geometry);
                fp.centroid = geometry::centroid(fp.geometry);
            }
            if (props.contains("area_m2"))
                fp.area_m2 = props["area_m2"].get<double>();
            else if (!fp.geometry.exterior.empty())
                fp.area_m2 = geometry::polygon_area_m2(fp.geometry);
            else
                throw DataError("registry feature " + fp.id + " has neither area_m2 nor geometry");
            fp.properties = props;
            r.footprints.push_back(std::move(fp));
        } catch (const json::exception& e) {
            throw DataError(std::string("malformed registry feature: ") + e.what());
        }
    }
    std::sort(r.footprints.begin(), r.footprints.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    recompute_totals(r);
    return r;
}

CityRegistry load_registry(const fs::path& polygons, const std::string& city) {
    return load_registry(geojson::read_file(polygons), city);
}

} // namespace roofpedia::tagging
