#include "roofpedia/segmenter.hpp"

#include "roofpedia/errors.hpp"

#include <algorithm>
#include <cmath>

namespace roofpedia::segment {

namespace {

struct Hsv {
    double h; // degrees
    double s;
    double v;
};

Hsv to_hsv(const std::array<std::uint8_t, 3>& rgb) {
    const double r = rgb[0] / 255.0, g = rgb[1] / 255.0, b = rgb[2] / 255.0;
    const double mx = std::max({r, g, b});
    const double mn = std::min({r, g, b});
    const double d = mx - mn;
    double h = 0.0;
    if (d > 0.0) {
        if (mx == r)
            h = 60.0 * std::fmod((g - b) / d, 6.0);
        else if (mx == g)
            h = 60.0 * ((b - r) / d + 2.0);
        else
            h = 60.0 * ((r - g) / d + 4.0);
        if (h < 0.0)
            h += 360.0;
    }
    return Hsv{h, mx > 0.0 ? d / mx : 0.0, mx};
}

double ramp(double x, double lo, double hi) { return std::clamp((x - lo) / (hi - lo), 0.0, 1.0); }

double luminance(const std::array<std::uint8_t, 3>& rgb) {
    return (0.299 * rgb[0] + 0.587 * rgb[1] + 0.114 * rgb[2]) / 255.0;
}

double vegetation_score(const Hsv& c) {
    double hue = 0.0;
    if (c.h >= 75.0 && c.h <= 165.0)
        hue = 1.0;
    else if (c.h >= 60.0 && c.h < 75.0)
        hue = ramp(c.h, 60.0, 75.0);
    else if (c.h > 165.0 && c.h <= 180.0)
        hue = 1.0 - ramp(c.h, 165.0, 180.0);
    return hue * ramp(c.s, 0.15, 0.30) * ramp(c.v, 0.10, 0.20);
}

constexpr int kEdgeRadius = 3;
constexpr double kEdgeStrength = 0.15;

} // namespace

raster::ProbabilityMask segment_tile(const RgbTile& img, Typology typology) {
    const int w = img.width;
    const int h = img.height;
    if (w <= 0 || h <= 0 || img.pixels.size() != static_cast<std::size_t>(w) * h * 3)
        throw DomainError("RGB tile dimensions do not match its pixel buffer");
    raster::ProbabilityMask out{img.tile, w, h, std::vector<float>(static_cast<std::size_t>(w) * h, 0.0f)};

    if (typology == Typology::Green) {
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                out.values[static_cast<std::size_t>(y) * w + x] =
                    static_cast<float>(vegetation_score(to_hsv(img.at(x, y))));
        return out;
    }

    std::vector<double> lum(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            lum[static_cast<std::size_t>(y) * w + x] = luminance(img.at(x, y));
    auto L = [&](int x, int y) {
        x = std::clamp(x, 0, w - 1);
        y = std::clamp(y, 0, h - 1);
        return lum[static_cast<std::size_t>(y) * w + x];
    };

    // Summed-area table of edge pixels for the windowed density.
    std::vector<int> integral(static_cast<std::size_t>(w + 1) * (h + 1), 0);
    for (int y = 0; y < h; ++y) {
        int row = 0;
        for (int x = 0; x < w; ++x) {
            const double grad = std::abs(L(x + 1, y) - L(x - 1, y)) + std::abs(L(x, y + 1) - L(x, y - 1));
            row += grad > kEdgeStrength ? 1 : 0;
            integral[static_cast<std::size_t>(y + 1) * (w + 1) + x + 1] =
                integral[static_cast<std::size_t>(y) * (w + 1) + x + 1] + row;
        }
    }
    auto window_sum = [&](int x0, int y0, int x1, int y1) {
        const auto W = static_cast<std::size_t>(w + 1);
        return integral[y1 * W + x1] - integral[y0 * W + x1] - integral[y1 * W + x0] + integral[y0 * W + x0];
    };

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const auto rgb = img.at(x, y);
            const Hsv c = to_hsv(rgb);
            const double colour = (1.0 - ramp(luminance(rgb), 0.20, 0.35)) * (1.0 - ramp(c.s, 0.30, 0.45));
            if (colour <= 0.0)
                continue;
            const int x0 = std::max(0, x - kEdgeRadius), x1 = std::min(w, x + kEdgeRadius + 1);
            const int y0 = std::max(0, y - kEdgeRadius), y1 = std::min(h, y + kEdgeRadius + 1);
            const double density =
                static_cast<double>(window_sum(x0, y0, x1, y1)) / static_cast<double>((x1 - x0) * (y1 - y0));
            const double texture = std::min(1.0, density / 0.25);
            out.values[static_cast<std::size_t>(y) * w + x] = static_cast<float>(colour * (0.6 + 0.4 * texture));
        }
    }
    return out;
}

} // namespace roofpedia::segment
