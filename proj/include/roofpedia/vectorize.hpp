#pragma once

#include "roofpedia/geometry.hpp"
#include "roofpedia/raster.hpp"
#include "roofpedia/typology.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace roofpedia::vectorize {

using geometry::GeoPolygon;
using tilegrid::TileId;

struct PixelPoint {
    double px = 0.0;
    double py = 0.0;

    auto operator<=>(const PixelPoint&) const = default;
};

/// Closed ring in tile pixel space. Exterior rings have positive shoelace area in
/// (px, py) coordinates, holes negative.
using PixelRing = std::vector<PixelPoint>;

/// Offset applied to both sides of a pinch vertex (two diagonal pixels of one
/// component) so every traced ring is strictly simple.
inline constexpr double kPinchChamfer = 1.0 / 32.0;

struct TracedPolygon {
    PixelRing exterior;
    std::vector<PixelRing> holes;
    std::int64_t pixel_count = 0;
};

/// Follows foreground pixel edges. One polygon per connected component, in label order;
/// vertices only where the boundary turns.
std::vector<TracedPolygon> trace_contours(const raster::BinaryMask& b, int connectivity = 8);

double signed_area(const PixelRing& ring);

/// Douglas-Peucker on a closed ring. Returns nullopt when fewer than 3 distinct vertices remain.
std::optional<PixelRing> simplify(const PixelRing& ring, double tolerance_px);

/// As above, but vertices for which `anchor` is true are always kept and split the ring
/// into independently simplified chains.
std::optional<PixelRing> simplify(const PixelRing& ring, double tolerance_px,
                                  const std::function<bool(const PixelPoint&)>& anchor);

/// Maps vertices through pixel_to_geo and normalizes orientation.
GeoPolygon georeference(const PixelRing& ring, const TileId& tile, int tile_size = tilegrid::kTileSize);
GeoPolygon georeference(const TracedPolygon& poly, const TileId& tile, int tile_size = tilegrid::kTileSize);

struct PredictionPolygon {
    Typology typology = Typology::Green;
    GeoPolygon geometry;
    std::vector<TileId> source_tiles;
    std::int64_t pixel_area = 0;
    double geo_area_m2 = 0.0;

    bool operator==(const PredictionPolygon&) const = default;
};

struct VectorizeParams {
    double threshold = 0.5;
    std::int64_t min_pixels = 60;
    double tolerance_px = 1.0;
    int connectivity = 8;
};

/// Validates ranges; throws DomainError.
void validate(const VectorizeParams& params);

/// threshold -> despeckle -> trace -> simplify -> georeference for one tile.
std::vector<PredictionPolygon> vectorize_tile(const TileId& tile, const raster::ProbabilityMask& mask,
                                              Typology typology, const VectorizeParams& params);

/// Snap grid for vertices of polygons being merged across tiles.
inline constexpr double kMergeSnapDegrees = 1e-9;

/// Unions polygons that touch or overlap. Output is in canonical order and does not
/// depend on the input order.
std::vector<PredictionPolygon> merge_cross_tile(std::vector<PredictionPolygon> polys);

/// Canonical order: typology, then smallest exterior vertex.
void sort_canonical(std::vector<PredictionPolygon>& polys);

/// All tiles of one typology, tile-parallel on `workers` threads, followed by the merge.
std::vector<PredictionPolygon> vectorize_tiles(std::span<const raster::ProbabilityMask> masks, Typology typology,
                                               const VectorizeParams& params, int workers);

/// Single-threaded reference for vectorize_tiles.
std::vector<PredictionPolygon> vectorize_tiles_serial(std::span<const raster::ProbabilityMask> masks,
                                                      Typology typology, const VectorizeParams& params);

} // namespace roofpedia::vectorize
