#pragma once

// Generated test city: painted imagery tiles, building footprints and the labels a
// correct pipeline must produce for them.

#include "roofpedia/segmenter.hpp"
#include "roofpedia/tagging.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace roofpedia::synthetic {

struct SyntheticParams {
    std::string city = "Synthetica";
    std::uint64_t seed = 20211;
    int zoom = 19;
    double origin_lon = 8.5400; // northwest corner lands in this tile
    double origin_lat = 47.3700;
    int tiles_x = 6;
    int tiles_y = 6;
    // Pipeline settings the expected labels are computed for.
    std::int64_t min_pixels = 60;
    tagging::TaggingParams tagging;
};

enum class FeatureKind { None, Green, Solar, Both, Speckle, Sliver, Grazing, Outside };

const char* to_string(FeatureKind k);

/// Half-open pixel rectangle in canvas coordinates (canvas origin = NW corner of the first tile).
struct PixelRect {
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;

    bool contains(int x, int y) const { return x >= x0 && x < x1 && y >= y0 && y < y1; }
};

struct PaintedFeature {
    Typology typology = Typology::Green;
    std::vector<PixelRect> rects; // union of rectangles
};

struct SyntheticBuilding {
    std::string id;
    PixelRect rect;
    FeatureKind kind = FeatureKind::None;
    std::vector<PaintedFeature> features;
    bool expect_green = false;
    bool expect_solar = false;
};

struct SyntheticCity {
    SyntheticParams params;
    tilegrid::TileId origin;
    std::vector<segment::RgbTile> imagery; // row-major over the tile block
    std::vector<SyntheticBuilding> buildings;
    nlohmann::json footprints;      // GeoJSON FeatureCollection
    tagging::CityRegistry truth;    // footprints with the expected labels
};

/// Per-feature-set evaluation done on the painted raster alone: per-tile despeckling,
/// 8-connected components, pixel-count areas and boundary-edge perimeters.
struct CellOracle {
    bool green = false;
    bool solar = false;
    /// Some feature/building pair has a metric within 15% of its threshold.
    bool near_threshold = false;
};

CellOracle evaluate_cell(const SyntheticBuilding& building, const SyntheticParams& params,
                         const tilegrid::TileId& origin);

SyntheticCity make_synthetic_city(const SyntheticParams& params = {});

/// Writes imagery/<z>/<x>/<y>.png, footprints.geojson, truth.geojson and city.ini into dir.
void write_synthetic_city(const SyntheticCity& city, const std::filesystem::path& dir);

} // namespace roofpedia::synthetic
