#pragma once

#include "roofpedia/metrics.hpp"
#include "roofpedia/tagging.hpp"
#include "roofpedia/typology.hpp"
#include "roofpedia/vectorize.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace roofpedia::pipeline {

namespace fs = std::filesystem;

/// Per-city run configuration. Every default used by the pipeline lives here.
struct PipelineConfig {
    std::string city = "city";
    fs::path imagery_dir = "imagery";
    fs::path mask_dir = "masks";
    fs::path footprints = "footprints.geojson";
    std::optional<fs::path> truth_green;
    std::optional<fs::path> truth_solar;
    fs::path out_dir = "out";
    int zoom = 19;
    vectorize::VectorizeParams vectorize;
    tagging::TaggingParams tagging;
    int workers = 0; // 0: all available threads
    std::vector<Typology> typologies = {Typology::Green, Typology::Solar};

    bool processes(Typology t) const;
};

/// Throws ConfigError on out-of-range values.
void validate(const PipelineConfig& config);

/// Reads a `key = value` config file. Relative paths resolve against the file's directory.
/// Unknown keys and unparsable values throw ConfigError; a missing file throws IoError.
PipelineConfig load_config(const fs::path& path);

/// Applies one key/value pair, as in a config file. Relative paths resolve against `base`.
void apply_setting(PipelineConfig& config, const std::string& key, const std::string& value, const fs::path& base);

// Artifact names inside out_dir.
fs::path predictions_path(const PipelineConfig& config, Typology t);
fs::path evaluation_csv_path(const fs::path& out_dir, Typology t, metrics::Unit unit);

/// Tiles present under `<root>/<zoom>/<x>/<y>.<ext>`, sorted. Files with other extensions
/// are ignored; non-numeric tile names throw DataError.
std::vector<tilegrid::TileId> list_tiles(const fs::path& root, int zoom, const std::vector<std::string>& extensions);

// Stages. Each returns a small JSON record of what it did (not written to disk).
nlohmann::json run_segment(const PipelineConfig& config);
nlohmann::json run_vectorize(const PipelineConfig& config);
nlohmann::json run_tag(const PipelineConfig& config);
/// Single-city evaluation against the configured truth registries.
nlohmann::json run_evaluate(const PipelineConfig& config);
/// Multi-region evaluation from a manifest (see README), CSVs written to out_dir.
nlohmann::json run_evaluate_manifest(const fs::path& manifest, const fs::path& out_dir);
/// Index tables from two or more summary.json files.
nlohmann::json run_index(const std::vector<fs::path>& summaries, const fs::path& out_dir);
/// segment, vectorize, tag and (when truth is configured) evaluate.
nlohmann::json run_pipeline(const PipelineConfig& config);

} // namespace roofpedia::pipeline
