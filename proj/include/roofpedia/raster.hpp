#pragma once

#include "roofpedia/tilegrid.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace roofpedia::raster {

using tilegrid::TileId;

/// Per-pixel model output in [0, 1], row-major from the northwest corner.
struct ProbabilityMask {
    TileId tile;
    int width = tilegrid::kTileSize;
    int height = tilegrid::kTileSize;
    std::vector<float> values;

    float at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

/// Thresholded mask; every value is 0 or 1.
struct BinaryMask {
    TileId tile;
    int width = tilegrid::kTileSize;
    int height = tilegrid::kTileSize;
    std::vector<std::uint8_t> values;

    static BinaryMask zeros(TileId tile, int width, int height);

    std::uint8_t at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
    bool inside(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }
    std::int64_t count() const;

    bool operator==(const BinaryMask&) const = default;
};

/// Labels are 0 for background and 1..k for components; sizes[i] is the pixel count of label i + 1.
struct ComponentSet {
    TileId tile;
    int width = 0;
    int height = 0;
    int connectivity = 8;
    std::vector<std::int32_t> labels;
    std::vector<std::int64_t> sizes;

    std::int32_t label_at(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }
    std::int32_t count() const { return static_cast<std::int32_t>(sizes.size()); }
};

/// Throws DomainError when dimensions disagree with the value buffer or a value leaves [0, 1].
void validate(const ProbabilityMask& m);
void validate(const BinaryMask& b);

/// pixel -> 1 iff value >= t. Requires 0 < t < 1.
BinaryMask threshold(const ProbabilityMask& m, double t);

/// Two-pass union-find labelling. Labels are assigned in raster order of each
/// component's first pixel, so the result is canonical.
ComponentSet connected_components(const BinaryMask& b, int connectivity = 8);

/// Zeroes every component smaller than min_pixels.
BinaryMask despeckle(const ComponentSet& c, std::int64_t min_pixels);

struct MaskPair {
    std::reference_wrapper<const BinaryMask> pred;
    std::reference_wrapper<const BinaryMask> truth;
};

/// |pred & truth| / |pred | truth|; 1.0 when both are empty.
double iou(const BinaryMask& pred, const BinaryMask& truth);

/// Mean of per-pair IoU. Throws DomainError on an empty list or a size mismatch.
double mean_iou(std::span<const MaskPair> pairs);

} // namespace roofpedia::raster
