// roofpedia command-line front end.
//
//   roofpedia pipeline --config city.ini [--workers N] [--out DIR]
//   roofpedia segment|vectorize|tag|evaluate --config city.ini
//   roofpedia evaluate --manifest regions.json --out DIR
//   roofpedia index --out DIR a/summary.json b/summary.json ...
//   roofpedia synth --out DIR [--seed S]
//
// Exit codes: 0 success, 1 usage/config error, 2 data error, 3 I/O error.

#include "roofpedia/errors.hpp"
#include "roofpedia/pipeline.hpp"
#include "roofpedia/synthetic.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <map>

namespace fs = std::filesystem;
using namespace roofpedia;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kIo = 3 };

int report_error(const char* kind, int code, const std::string& message) {
    json err = {{"error", {{"kind", kind}, {"exit_code", code}, {"message", message}}}};
    std::cerr << err.dump() << '\n';
    return code;
}

// Flags shared by the per-city commands; each maps to a config key.
struct CityFlags {
    std::string config;
    std::map<std::string, std::string> values;

    void add(CLI::App* cmd) {
        cmd->add_option("--config", config, "Per-city config file (key = value)");
        add_key(cmd, "--city", "city", "City name");
        add_key(cmd, "--zoom", "zoom", "Tile zoom level (default 19)");
        add_key(cmd, "--threshold", "threshold", "Mask binarization threshold (default 0.5)");
        add_key(cmd, "--min-pixels", "min_pixels", "Despeckle size in pixels (default 60)");
        add_key(cmd, "--tolerance", "tolerance", "Simplification tolerance in pixels (default 1)");
        add_key(cmd, "--workers", "workers", "Worker threads, 0 = all (default 0)");
        add_key(cmd, "--out", "out", "Output directory");
        add_key(cmd, "--imagery-dir", "imagery_dir", "Imagery tiles <z>/<x>/<y>.png|jpg");
        add_key(cmd, "--mask-dir", "mask_dir", "Mask tiles <typology>/<z>/<x>/<y>.png");
        add_key(cmd, "--footprints", "footprints", "Building footprints GeoJSON");
        add_key(cmd, "--truth-green", "truth_green", "Ground-truth registry for green roofs");
        add_key(cmd, "--truth-solar", "truth_solar", "Ground-truth registry for solar roofs");
        add_key(cmd, "--typologies", "typologies", "green,solar");
    }

    void add_key(CLI::App* cmd, const std::string& flag, const std::string& key, const std::string& help) {
        cmd->add_option_function<std::string>(flag, [this, key](const std::string& v) { values[key] = v; }, help);
    }

    pipeline::PipelineConfig resolve() const {
        auto c = config.empty() ? pipeline::PipelineConfig{} : pipeline::load_config(config);
        for (const auto& [k, v] : values)
            pipeline::apply_setting(c, k, v, {});
        pipeline::validate(c);
        return c;
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Roof registry builder: masks to polygons, building tagging, evaluation and city index"};
    app.require_subcommand(1);

    CityFlags flags;
    std::map<std::string, CLI::App*> city_cmds;
    for (auto [name, help] : {std::pair{"segment", "Baseline masks from imagery tiles"},
                              std::pair{"vectorize", "Masks to prediction polygons"},
                              std::pair{"tag", "Predictions and footprints to a building registry"},
                              std::pair{"evaluate", "Registry against ground truth, evaluation CSVs"},
                              std::pair{"pipeline", "segment, vectorize, tag and evaluate for one city"}}) {
        auto* cmd = app.add_subcommand(name, help);
        flags.add(cmd);
        city_cmds[name] = cmd;
    }
    std::string manifest;
    city_cmds["evaluate"]->add_option("--manifest", manifest, "JSON manifest of regions (multi-region evaluation)");

    auto* index_cmd = app.add_subcommand("index", "City index tables from two or more summary.json files");
    std::vector<std::string> summaries;
    std::string index_out = "out";
    index_cmd->add_option("summaries", summaries, "summary.json files")->required();
    index_cmd->add_option("--out", index_out, "Output directory");

    auto* synth_cmd = app.add_subcommand("synth", "Write a generated test city");
    synthetic::SyntheticParams sp;
    std::string synth_out;
    synth_cmd->add_option("--out", synth_out, "Output directory")->required();
    synth_cmd->add_option("--seed", sp.seed, "Random seed");
    synth_cmd->add_option("--city", sp.city, "City name");
    synth_cmd->add_option("--tiles", sp.tiles_x, "Tiles per side")->check(CLI::Range(1, 64));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report_error("usage", kUsage, e.what());
    }

    try {
        json record;
        if (index_cmd->parsed()) {
            std::vector<fs::path> paths(summaries.begin(), summaries.end());
            record = pipeline::run_index(paths, index_out);
        } else if (synth_cmd->parsed()) {
            sp.tiles_y = sp.tiles_x;
            const auto city = synthetic::make_synthetic_city(sp);
            synthetic::write_synthetic_city(city, synth_out);
            record = {{"stage", "synth"}, {"city", sp.city}, {"buildings", city.buildings.size()},
                      {"tiles", city.imagery.size()}, {"summary", tagging::summary_to_json(city.truth.summary)}};
        } else if (city_cmds["evaluate"]->parsed() && !manifest.empty()) {
            const auto out = flags.values.count("out") ? fs::path(flags.values.at("out")) : fs::path("out");
            record = pipeline::run_evaluate_manifest(manifest, out);
        } else {
            const auto config = flags.resolve();
            if (city_cmds["segment"]->parsed())
                record = pipeline::run_segment(config);
            else if (city_cmds["vectorize"]->parsed())
                record = pipeline::run_vectorize(config);
            else if (city_cmds["tag"]->parsed())
                record = pipeline::run_tag(config);
            else if (city_cmds["evaluate"]->parsed())
                record = pipeline::run_evaluate(config);
            else
                record = pipeline::run_pipeline(config);
        }
        std::cout << record.dump() << '\n';
        return kOk;
    } catch (const ConfigError& e) {
        return report_error("config", kUsage, e.what());
    } catch (const DomainError& e) {
        return report_error("config", kUsage, e.what());
    } catch (const DataError& e) {
        return report_error("data", kData, e.what());
    } catch (const IoError& e) {
        return report_error("io", kIo, e.what());
    } catch (const std::exception& e) {
        return report_error("internal", kData, e.what());
    }
}
