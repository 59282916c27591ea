#include "roofpedia/pipeline.hpp"

#include "roofpedia/city_index.hpp"
#include "roofpedia/errors.hpp"
#include "roofpedia/footprints.hpp"
#include "roofpedia/geojson.hpp"
#include "roofpedia/image_io.hpp"
#include "roofpedia/parallel.hpp"
#include "roofpedia/segmenter.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>

namespace roofpedia::pipeline {

using nlohmann::json;

namespace {

template <class T>
T parse_number(const std::string& key, const std::string& value) {
    T out{};
    const auto* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end)
        throw ConfigError("invalid value for " + key + ": '" + value + "'");
    return out;
}

fs::path resolve(const fs::path& base, const std::string& value) {
    fs::path p(value);
    return p.is_absolute() || base.empty() ? p : base / p;
}

std::vector<Typology> parse_typologies(const std::string& key, const std::string& value) {
    std::vector<Typology> out;
    std::string token;
    auto flush = [&] {
        if (token.empty())
            return;
        auto t = parse_typology(token);
        if (!t)
            throw ConfigError("invalid value for " + key + ": unknown typology '" + token + "'");
        if (std::find(out.begin(), out.end(), *t) == out.end())
            out.push_back(*t);
        token.clear();
    };
    for (char c : value) {
        if (c == ',' || c == ' ' || c == '[' || c == ']' || c == '"' || c == '\'')
            flush();
        else
            token.push_back(c);
    }
    flush();
    std::sort(out.begin(), out.end());
    return out;
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec)
            throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out)
        throw IoError("cannot write " + path.string());
}

void require_dir(const fs::path& dir, const std::string& what) {
    if (!fs::is_directory(dir))
        throw IoError(what + " not found: " + dir.string());
}

segment::RgbTile load_imagery(const fs::path& path, const tilegrid::TileId& tile) {
    auto img = image::read_rgb(path);
    if (img.width != tilegrid::kTileSize || img.height != tilegrid::kTileSize)
        throw DataError(path.string() + ": imagery tile must be " + std::to_string(tilegrid::kTileSize) + "x" +
                        std::to_string(tilegrid::kTileSize));
    segment::RgbTile t;
    t.tile = tile;
    t.pixels = std::move(img.pixels);
    return t;
}

fs::path tile_file(const fs::path& root, const tilegrid::TileId& t, const std::string& ext) {
    return root / std::to_string(t.zoom) / std::to_string(t.x) / (std::to_string(t.y) + ext);
}

std::vector<std::pair<tilegrid::TileId, fs::path>> list_tile_files(const fs::path& root, int zoom,
                                                                    const std::vector<std::string>& extensions) {
    std::map<tilegrid::TileId, fs::path> found;
    const fs::path zdir = root / std::to_string(zoom);
    if (!fs::is_directory(zdir))
        return {};
    auto as_index = [](const std::string& s, const fs::path& where) {
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
            throw DataError("not a tile path: " + where.string());
        return v;
    };
    for (const auto& xdir : fs::directory_iterator(zdir)) {
        if (!xdir.is_directory())
            continue;
        const auto x = as_index(xdir.path().filename().string(), xdir.path());
        for (const auto& f : fs::directory_iterator(xdir.path())) {
            if (!f.is_regular_file())
                continue;
            auto ext = f.path().extension().string();
            std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
            if (std::find(extensions.begin(), extensions.end(), ext) == extensions.end())
                continue;
            tilegrid::TileId t{zoom, x, as_index(f.path().stem().string(), f.path())};
            try {
                tilegrid::validate(t);
            } catch (const DomainError& e) {
                throw DataError(f.path().string() + ": " + e.what());
            }
            if (!found.emplace(t, f.path()).second)
                throw DataError("duplicate tile " + geojson::tile_key(t) + " under " + root.string());
        }
    }
    return {found.begin(), found.end()};
}

std::string typology_key(Typology t) { return std::string(to_string(t)); }

} // namespace

bool PipelineConfig::processes(Typology t) const {
    return std::find(typologies.begin(), typologies.end(), t) != typologies.end();
}

void validate(const PipelineConfig& c) {
    if (c.city.empty())
        throw ConfigError("city must not be empty");
    if (c.zoom < 0 || c.zoom > tilegrid::kMaxZoom)
        throw ConfigError("zoom must be in 0..22, got " + std::to_string(c.zoom));
    if (c.workers < 0)
        throw ConfigError("workers must be >= 0");
    if (c.typologies.empty())
        throw ConfigError("at least one typology required");
    try {
        vectorize::validate(c.vectorize);
        tagging::validate(c.tagging);
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
}

void apply_setting(PipelineConfig& c, const std::string& key, const std::string& value, const fs::path& base) {
    if (key == "city")
        c.city = value;
    else if (key == "imagery_dir")
        c.imagery_dir = resolve(base, value);
    else if (key == "mask_dir")
        c.mask_dir = resolve(base, value);
    else if (key == "footprints")
        c.footprints = resolve(base, value);
    else if (key == "truth_green")
        c.truth_green = resolve(base, value);
    else if (key == "truth_solar")
        c.truth_solar = resolve(base, value);
    else if (key == "out")
        c.out_dir = resolve(base, value);
    else if (key == "zoom")
        c.zoom = parse_number<int>(key, value);
    else if (key == "threshold")
        c.vectorize.threshold = parse_number<double>(key, value);
    else if (key == "min_pixels")
        c.vectorize.min_pixels = parse_number<std::int64_t>(key, value);
    else if (key == "tolerance")
        c.vectorize.tolerance_px = parse_number<double>(key, value);
    else if (key == "connectivity")
        c.vectorize.connectivity = parse_number<int>(key, value);
    else if (key == "min_overlap_m2")
        c.tagging.min_overlap_m2 = parse_number<double>(key, value);
    else if (key == "min_overlap_ratio")
        c.tagging.min_overlap_ratio = parse_number<double>(key, value);
    else if (key == "min_compactness")
        c.tagging.min_compactness = parse_number<double>(key, value);
    else if (key == "workers")
        c.workers = parse_number<int>(key, value);
    else if (key == "typologies")
        c.typologies = parse_typologies(key, value);
    else
        throw ConfigError("unknown config key '" + key + "'");
}

PipelineConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open config " + path.string());
    std::vector<CLI::ConfigItem> items;
    try {
        items = CLI::ConfigINI().from_config(in);
    } catch (const CLI::Error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    PipelineConfig c;
    const auto base = path.parent_path();
    for (const auto& item : items) {
        if (item.name == "++" || item.name == "--")
            continue; // section markers
        if (!item.parents.empty() && !(item.parents.size() == 1 && item.parents[0] == "default"))
            throw ConfigError(path.string() + ": sections are not supported (key '" + item.name + "')");
        std::string value;
        for (const auto& v : item.inputs)
            value += (value.empty() ? "" : ",") + v;
        apply_setting(c, item.name, value, base);
    }
    validate(c);
    return c;
}

fs::path predictions_path(const PipelineConfig& c, Typology t) {
    return c.out_dir / ("predictions_" + typology_key(t) + ".geojson");
}

fs::path evaluation_csv_path(const fs::path& out_dir, Typology t, metrics::Unit unit) {
    return out_dir / ("evaluation_" + typology_key(t) + "_" + metrics::to_string(unit) + ".csv");
}

std::vector<tilegrid::TileId> list_tiles(const fs::path& root, int zoom, const std::vector<std::string>& extensions) {
    std::vector<tilegrid::TileId> out;
    for (auto& [t, p] : list_tile_files(root, zoom, extensions))
        out.push_back(t);
    return out;
}

json run_segment(const PipelineConfig& c) {
    validate(c);
    require_dir(c.imagery_dir, "imagery directory");
    const auto tiles = list_tile_files(c.imagery_dir, c.zoom, {".png", ".jpg", ".jpeg"});
    // Directories are created up front so workers only write files.
    for (Typology t : c.typologies)
        for (const auto& [tile, path] : tiles) {
            std::error_code ec;
            const auto dir = tile_file(c.mask_dir / typology_key(t), tile, ".png").parent_path();
            fs::create_directories(dir, ec);
            if (ec)
                throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
        }
    parallel::for_each_index(tiles.size(), c.workers, [&](std::size_t i) {
        const auto& [tile, path] = tiles[i];
        const auto img = load_imagery(path, tile);
        for (Typology t : c.typologies) {
            const auto mask = segment::segment_tile(img, t);
            image::write_gray_png(tile_file(c.mask_dir / typology_key(t), tile, ".png"), image::from_probability(mask));
        }
    });
    return {{"stage", "segment"}, {"city", c.city}, {"tiles", tiles.size()}};
}

json run_vectorize(const PipelineConfig& c) {
    validate(c);
    json record = {{"stage", "vectorize"}, {"city", c.city}};
    for (Typology t : c.typologies) {
        const auto dir = c.mask_dir / typology_key(t);
        require_dir(dir, "mask directory");
        const auto files = list_tile_files(dir, c.zoom, {".png"});
        std::vector<raster::ProbabilityMask> masks(files.size());
        parallel::for_each_index(files.size(), c.workers, [&](std::size_t i) {
            masks[i] = image::to_probability(image::read_gray_png(files[i].second), files[i].first);
        });
        const auto polys = vectorize::vectorize_tiles(masks, t, c.vectorize, c.workers);
        geojson::write_file(predictions_path(c, t), geojson::predictions_to_json(polys));
        record[typology_key(t)] = {{"tiles", files.size()}, {"polygons", polys.size()}};
    }
    return record;
}

json run_tag(const PipelineConfig& c) {
    validate(c);
    auto loaded = footprints::load_footprints(c.footprints);
    if (loaded.footprints.empty())
        throw DataError(c.footprints.string() + ": no valid building footprints");
    std::vector<vectorize::PredictionPolygon> predictions;
    for (Typology t : c.typologies) {
        auto polys = geojson::predictions_from_json(geojson::read_file(predictions_path(c, t)));
        for (auto& p : polys)
            if (p.typology != t)
                throw DataError(predictions_path(c, t).string() + ": contains a " + typology_key(p.typology) +
                                " prediction");
        predictions.insert(predictions.end(), std::make_move_iterator(polys.begin()),
                           std::make_move_iterator(polys.end()));
    }
    const auto index = footprints::build_spatial_index(loaded.footprints);
    tagging::TaggingReport report;
    auto registry = tagging::tag_buildings(c.city, std::move(loaded.footprints), index, predictions, c.tagging,
                                           c.workers, &report, c.processes(Typology::Green),
                                           c.processes(Typology::Solar));
    tagging::export_registry(registry, c.out_dir);
    return {{"stage", "tag"},
            {"city", c.city},
            {"footprints", registry.footprints.size()},
            {"footprint_warnings", loaded.warnings},
            {"predictions", report.predictions},
            {"without_footprint", report.without_footprint},
            {"insignificant", report.insignificant},
            {"summary", tagging::summary_to_json(registry.summary)}};
}

json run_evaluate(const PipelineConfig& c) {
    validate(c);
    const bool any = std::any_of(c.typologies.begin(), c.typologies.end(), [&](Typology t) {
        return t == Typology::Green ? c.truth_green.has_value() : c.truth_solar.has_value();
    });
    if (!any)
        throw ConfigError("no truth registry configured (truth_green / truth_solar)");
    const auto predicted = tagging::load_registry(c.out_dir / tagging::kRegistryPolygons, c.city);
    json record = {{"stage", "evaluate"}, {"city", c.city}};
    for (Typology t : c.typologies) {
        const auto& truth_path = t == Typology::Green ? c.truth_green : c.truth_solar;
        if (!truth_path)
            continue;
        const auto truth = tagging::load_registry(*truth_path, c.city);
        const std::vector<metrics::RegionRegistries> regions = {{c.city, std::nullopt, predicted, truth}};
        for (auto unit : {metrics::Unit::Count, metrics::Unit::Area}) {
            const auto report = metrics::evaluation_report(std::span<const metrics::RegionRegistries>(regions), t, unit);
            write_text(evaluation_csv_path(c.out_dir, t, unit), metrics::to_csv(report));
            const auto& row = report.rows.front();
            record[typology_key(t)][metrics::to_string(unit)] = {
                {"truth", row.tally.truth}, {"pred", row.tally.pred},   {"matching", row.tally.tp},
                {"fp", row.tally.fp},       {"pct_fp", row.pct_fp},     {"pct_cover", row.pct_cover},
                {"pct_matching", row.pct_matching ? json(*row.pct_matching) : json(nullptr)}};
        }
    }
    return record;
}

json run_evaluate_manifest(const fs::path& manifest_path, const fs::path& out_dir) {
    const auto doc = geojson::read_file(manifest_path);
    const auto base = manifest_path.parent_path();
    if (!doc.is_object() || !doc.contains("regions") || !doc["regions"].is_array() || doc["regions"].empty())
        throw DataError(manifest_path.string() + ": expected an object with a non-empty \"regions\" array");

    // Registries are loaded once per path.
    std::map<fs::path, tagging::CityRegistry> cache;
    auto registry = [&](const json& v, const std::string& region) -> const tagging::CityRegistry& {
        if (!v.is_string())
            throw DataError(manifest_path.string() + ": registry path for " + region + " must be a string");
        const auto p = resolve(base, v.get<std::string>());
        auto it = cache.find(p);
        if (it == cache.end())
            it = cache.emplace(p, tagging::load_registry(p, region)).first;
        return it->second;
    };

    json record = {{"stage", "evaluate"}, {"outputs", json::array()}};
    try {
        for (Typology t : kTypologies) {
            for (auto unit : {metrics::Unit::Count, metrics::Unit::Area}) {
                std::vector<metrics::RegionTally> rows;
                for (const auto& r : doc["regions"]) {
                    const auto name = r.at("name").get<std::string>();
                    std::optional<double> area;
                    if (r.contains("area_km2") && !r["area_km2"].is_null())
                        area = r["area_km2"].get<double>();
                    const auto tk = typology_key(t);
                    const std::string uk = metrics::to_string(unit);
                    if (r.contains("tallies") && r["tallies"].contains(tk) && r["tallies"][tk].contains(uk)) {
                        const auto& v = r["tallies"][tk][uk];
                        rows.push_back({name, area,
                                        metrics::make_confusion(unit, v.at("total").get<double>(),
                                                                v.at("truth").get<double>(), v.at("pred").get<double>(),
                                                                v.at("matching").get<double>())});
                        continue;
                    }
                    const std::string truth_key = r.contains("truth_" + tk) ? "truth_" + tk : "truth";
                    if (r.contains("predicted") && r.contains(truth_key)) {
                        const auto& pred = registry(r["predicted"], name);
                        const auto& truth = registry(r[truth_key], name);
                        if (!pred.summary.totals(t).has_value())
                            continue;
                        rows.push_back({name, area, metrics::confusion(pred, truth, t, unit)});
                    }
                }
                if (rows.empty())
                    continue;
                const auto report = metrics::evaluation_report(std::span<const metrics::RegionTally>(rows), t, unit);
                const auto path = evaluation_csv_path(out_dir, t, unit);
                write_text(path, metrics::to_csv(report));
                record["outputs"].push_back(path.filename().string());
                for (const auto& w : report.warnings)
                    record["warnings"].push_back(w);
            }
        }
    } catch (const json::exception& e) {
        throw DataError(manifest_path.string() + ": " + e.what());
    } catch (const DomainError& e) {
        throw DataError(manifest_path.string() + ": " + e.what());
    }
    if (record["outputs"].empty())
        throw DataError(manifest_path.string() + ": no region provides tallies or registries");
    return record;
}

json run_index(const std::vector<fs::path>& summaries, const fs::path& out_dir) {
    std::vector<tagging::CitySummary> cities;
    for (const auto& p : summaries) {
        try {
            cities.push_back(tagging::summary_from_json(geojson::read_file(p)));
        } catch (const json::exception& e) {
            throw DataError(p.string() + ": " + e.what());
        }
    }
    if (cities.size() < 2)
        throw ConfigError("at least 2 cities required for the index, got " + std::to_string(cities.size()));
    const auto tables = index::build_index_tables(cities);
    write_text(out_dir / "index_green.csv", index::typology_table_csv(tables.green, Typology::Green));
    write_text(out_dir / "index_solar.csv", index::typology_table_csv(tables.solar, Typology::Solar));
    write_text(out_dir / "index_overall.csv", index::overall_table_csv(tables.overall));
    geojson::write_file(out_dir / "index.json", index::tables_to_json(tables));
    return {{"stage", "index"},
            {"cities", cities.size()},
            {"excluded_from_overall", tables.excluded_from_overall},
            {"warnings", tables.warnings}};
}

json run_pipeline(const PipelineConfig& c) {
    json record = {{"stage", "pipeline"}, {"city", c.city}, {"stages", json::array()}};
    record["stages"].push_back(run_segment(c));
    record["stages"].push_back(run_vectorize(c));
    record["stages"].push_back(run_tag(c));
    if (c.truth_green || c.truth_solar)
        record["stages"].push_back(run_evaluate(c));
    return record;
}

} // namespace roofpedia::pipeline
