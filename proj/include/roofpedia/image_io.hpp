#pragma once

#include "roofpedia/raster.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace roofpedia::image {

struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;
};

/// Interleaved 8-bit RGB, row-major.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;
};

// Readers throw IoError when the file cannot be opened and DataError when it cannot be decoded.
GrayImage read_gray_png(const std::filesystem::path& path);
/// PNG or JPEG, chosen by extension.
RgbImage read_rgb(const std::filesystem::path& path);

// Writers create parent directories. Output bytes depend only on the pixels.
void write_gray_png(const std::filesystem::path& path, const GrayImage& img);
void write_rgb_png(const std::filesystem::path& path, const RgbImage& img);

raster::ProbabilityMask to_probability(const GrayImage& img, const tilegrid::TileId& tile);
GrayImage from_probability(const raster::ProbabilityMask& m);
GrayImage from_binary(const raster::BinaryMask& b);

} // namespace roofpedia::image
