#pragma once

// Heuristic colour/texture mask provider. It stands in for a trained segmentation
// network so the pipeline can run on synthetic imagery; detection quality is not a goal.

#include "roofpedia/raster.hpp"
#include "roofpedia/typology.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace roofpedia::segment {

struct RgbTile {
    tilegrid::TileId tile;
    int width = tilegrid::kTileSize;
    int height = tilegrid::kTileSize;
    std::vector<std::uint8_t> pixels; // interleaved RGB, row-major

    std::array<std::uint8_t, 3> at(int x, int y) const {
        const auto i = (static_cast<std::size_t>(y) * width + x) * 3;
        return {pixels[i], pixels[i + 1], pixels[i + 2]};
    }
};

/// Colours the rules are tuned on; fixtures paint with these.
inline constexpr std::array<std::uint8_t, 3> kPanelReference = {35, 40, 48};
inline constexpr std::array<std::uint8_t, 3> kVegetationReference = {60, 140, 50};

/// Green: vegetation hue band with moderate saturation.
/// Solar: dark, weakly saturated pixels, boosted by local edge density.
raster::ProbabilityMask segment_tile(const RgbTile& img, Typology typology);

} // namespace roofpedia::segment
