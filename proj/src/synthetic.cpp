#include "roofpedia/synthetic.hpp"

#include "roofpedia/errors.hpp"
#include "roofpedia/geojson.hpp"
#include "roofpedia/image_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <fstream>
#include <map>
#include <numbers>
#include <random>

namespace roofpedia::synthetic {

namespace fs = std::filesystem;
using tilegrid::kTileSize;

namespace {

constexpr int kCellPx = 64;
constexpr int kCellOffset = 40; // puts every tile edge at cell-local 24
constexpr int kBuildingInset = 4;
constexpr int kMaxAttempts = 50;
constexpr double kNearFraction = 0.15;

constexpr std::array<std::uint8_t, 3> kGround = {190, 180, 160};
constexpr std::array<std::uint8_t, 3> kRoof = {150, 150, 150};

struct Window {
    int x0, y0, w, h;
};

bool near(double value, double threshold) {
    return std::abs(value - threshold) < kNearFraction * threshold;
}

// Pixel side length in metres on the authalic sphere at latitude lat.
double pixel_side_m(double lat, int zoom) {
    return 2.0 * std::numbers::pi * geometry::kAuthalicRadius * std::cos(lat * std::numbers::pi / 180.0) /
           (static_cast<double>(kTileSize) * std::ldexp(1.0, zoom));
}

struct Component {
    std::int64_t pixels = 0;
    std::int64_t edges = 0;
    std::int64_t overlap = 0;
};

// Connected components of `mask` inside the window; when per_tile is set, pixels in
// different tiles are never joined.
std::vector<std::vector<std::pair<int, int>>> components(const std::vector<std::uint8_t>& mask, const Window& w,
                                                         bool per_tile) {
    std::vector<std::uint8_t> seen(mask.size(), 0);
    std::vector<std::vector<std::pair<int, int>>> out;
    for (int y = 0; y < w.h; ++y) {
        for (int x = 0; x < w.w; ++x) {
            const auto i = static_cast<std::size_t>(y) * w.w + x;
            if (!mask[i] || seen[i])
                continue;
            std::vector<std::pair<int, int>> comp;
            std::deque<std::pair<int, int>> queue{{x, y}};
            seen[i] = 1;
            while (!queue.empty()) {
                auto [cx, cy] = queue.front();
                queue.pop_front();
                comp.emplace_back(cx, cy);
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = cx + dx, ny = cy + dy;
                        if ((dx == 0 && dy == 0) || nx < 0 || ny < 0 || nx >= w.w || ny >= w.h)
                            continue;
                        if (per_tile && ((w.x0 + nx) / kTileSize != (w.x0 + cx) / kTileSize ||
                                         (w.y0 + ny) / kTileSize != (w.y0 + cy) / kTileSize))
                            continue;
                        const auto j = static_cast<std::size_t>(ny) * w.w + nx;
                        if (mask[j] && !seen[j]) {
                            seen[j] = 1;
                            queue.emplace_back(nx, ny);
                        }
                    }
                }
            }
            out.push_back(std::move(comp));
        }
    }
    return out;
}

std::vector<Component> evaluate_typology(const SyntheticBuilding& b, Typology t, const Window& w,
                                         std::int64_t min_pixels) {
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(w.w) * w.h, 0);
    for (const auto& f : b.features) {
        if (f.typology != t)
            continue;
        for (const auto& r : f.rects)
            for (int y = r.y0; y < r.y1; ++y)
                for (int x = r.x0; x < r.x1; ++x)
                    mask[static_cast<std::size_t>(y - w.y0) * w.w + (x - w.x0)] = 1;
    }
    for (const auto& piece : components(mask, w, true))
        if (static_cast<std::int64_t>(piece.size()) < min_pixels)
            for (auto [x, y] : piece)
                mask[static_cast<std::size_t>(y) * w.w + x] = 0;

    std::vector<Component> out;
    for (const auto& comp : components(mask, w, false)) {
        Component c;
        c.pixels = static_cast<std::int64_t>(comp.size());
        for (auto [x, y] : comp) {
            constexpr std::array<std::pair<int, int>, 4> kN = {{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
            for (auto [dx, dy] : kN) {
                const int nx = x + dx, ny = y + dy;
                if (nx < 0 || ny < 0 || nx >= w.w || ny >= w.h || !mask[static_cast<std::size_t>(ny) * w.w + nx])
                    ++c.edges;
            }
            if (b.rect.contains(w.x0 + x, w.y0 + y))
                ++c.overlap;
        }
        out.push_back(c);
    }
    return out;
}

PixelRect rect_at(int x0, int y0, int w, int h) { return {x0, y0, x0 + w, y0 + h}; }

struct Draw {
    FeatureKind kind;
    PixelRect rect;
    std::vector<PaintedFeature> features;
};

FeatureKind draw_kind(std::mt19937_64& rng) {
    // none, green, solar, both, speckle, sliver, grazing, outside
    std::discrete_distribution<int> d({25, 15, 15, 10, 8, 9, 9, 9});
    return static_cast<FeatureKind>(d(rng));
}

Draw draw_cell(FeatureKind kind, int cx0, int cy0, std::mt19937_64& rng) {
    auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    auto any_typology = [&] { return uni(0, 1) == 0 ? Typology::Green : Typology::Solar; };
    const int bx = cx0 + kBuildingInset, by = cy0 + kBuildingInset;

    Draw d{kind, {}, {}};
    int w = uni(26, 40), h = uni(26, 40);
    switch (kind) {
    case FeatureKind::Both: w = uni(32, 40); break;
    case FeatureKind::Sliver: w = h = 40; break;
    case FeatureKind::Grazing: w = uni(34, 40); break;
    case FeatureKind::Outside: w = uni(26, 36), h = uni(26, 36); break;
    default: break;
    }
    d.rect = rect_at(bx, by, w, h);

    auto patch_in = [&](Typology t, int x_lo, int x_hi) {
        // patch fully inside [x_lo, x_hi) horizontally and the building vertically, 2 px margin
        const int pw = uni(12, x_hi - x_lo - 4);
        const int ph = uni(12, h - 4);
        const int px = uni(x_lo + 2, x_hi - 2 - pw);
        const int py = uni(by + 2, by + h - 2 - ph);
        d.features.push_back({t, {rect_at(px, py, pw, ph)}});
    };

    switch (kind) {
    case FeatureKind::None: break;
    case FeatureKind::Green: patch_in(Typology::Green, bx, bx + w); break;
    case FeatureKind::Solar: patch_in(Typology::Solar, bx, bx + w); break;
    case FeatureKind::Both:
        patch_in(Typology::Green, bx, bx + w / 2);
        patch_in(Typology::Solar, bx + w / 2, bx + w);
        break;
    case FeatureKind::Speckle:
        d.features.push_back({any_typology(), {rect_at(uni(bx + 2, bx + w - 7), uni(by + 2, by + h - 7), 5, 5)}});
        break;
    case FeatureKind::Sliver:
        d.features.push_back({any_typology(),
                              {rect_at(bx + 2, by + 2, 2, 36), rect_at(bx + 2, by + 36, 36, 2),
                               rect_at(bx + 36, by + 2, 2, 36)}});
        break;
    case FeatureKind::Grazing:
        d.features.push_back({any_typology(), {rect_at(bx + 2, by + h - 1, 30, 14)}});
        break;
    case FeatureKind::Outside:
        d.features.push_back({any_typology(), {rect_at(cx0 + 50, cy0 + 50, 10, 10)}});
        break;
    }
    return d;
}

void paint(std::vector<std::uint8_t>& canvas, int width, const PixelRect& r, const std::array<std::uint8_t, 3>& c) {
    for (int y = r.y0; y < r.y1; ++y)
        for (int x = r.x0; x < r.x1; ++x)
            std::copy(c.begin(), c.end(), canvas.begin() + (static_cast<std::ptrdiff_t>(y) * width + x) * 3);
}

} // namespace

const char* to_string(FeatureKind k) {
    switch (k) {
    case FeatureKind::None: return "none";
    case FeatureKind::Green: return "green";
    case FeatureKind::Solar: return "solar";
    case FeatureKind::Both: return "both";
    case FeatureKind::Speckle: return "speckle";
    case FeatureKind::Sliver: return "sliver";
    case FeatureKind::Grazing: return "grazing";
    case FeatureKind::Outside: return "outside";
    }
    return "?";
}

CellOracle evaluate_cell(const SyntheticBuilding& b, const SyntheticParams& params, const tilegrid::TileId& origin) {
    // Window: the building's cell, which contains all of its features.
    const int cx0 = b.rect.x0 - kBuildingInset, cy0 = b.rect.y0 - kBuildingInset;
    const Window w{cx0, cy0, kCellPx, kCellPx};
    const auto centre = tilegrid::pixel_to_geo(origin, 0.5 * (b.rect.x0 + b.rect.x1), 0.5 * (b.rect.y0 + b.rect.y1));
    const double side = pixel_side_m(centre.lat, params.zoom);
    const double px_area = side * side;
    const auto& tp = params.tagging;

    CellOracle out;
    for (Typology t : kTypologies) {
        bool tagged = false;
        for (const auto& c : evaluate_typology(b, t, w, params.min_pixels)) {
            if (c.overlap == 0)
                continue;
            const double overlap_m2 = static_cast<double>(c.overlap) * px_area;
            const double ratio = static_cast<double>(c.overlap) / static_cast<double>(c.pixels);
            const double comp = 4.0 * std::numbers::pi * static_cast<double>(c.pixels) /
                                (static_cast<double>(c.edges) * static_cast<double>(c.edges));
            if (near(overlap_m2, tp.min_overlap_m2) || near(ratio, tp.min_overlap_ratio) ||
                near(comp, tp.min_compactness))
                out.near_threshold = true;
            if (overlap_m2 >= tp.min_overlap_m2 && ratio >= tp.min_overlap_ratio && comp >= tp.min_compactness)
                tagged = true;
        }
        (t == Typology::Green ? out.green : out.solar) = tagged;
    }
    return out;
}

SyntheticCity make_synthetic_city(const SyntheticParams& params) {
    if (params.tiles_x < 1 || params.tiles_y < 1)
        throw DomainError("synthetic city needs at least one tile");
    tagging::validate(params.tagging);

    SyntheticCity city;
    city.params = params;
    city.origin = tilegrid::tile_of(tilegrid::make_point(params.origin_lon, params.origin_lat), params.zoom);
    const int width = params.tiles_x * kTileSize, height = params.tiles_y * kTileSize;
    const int cells_x = (width - kCellOffset) / kCellPx, cells_y = (height - kCellOffset) / kCellPx;

    std::mt19937_64 rng(params.seed);
    for (int cy = 0; cy < cells_y; ++cy) {
        for (int cx = 0; cx < cells_x; ++cx) {
            const int x0 = kCellOffset + cx * kCellPx, y0 = kCellOffset + cy * kCellPx;
            SyntheticBuilding b;
            char id[16];
            std::snprintf(id, sizeof id, "b%04zu", city.buildings.size() + 1);
            b.id = id;
            const FeatureKind wanted = draw_kind(rng);
            bool accepted = false;
            for (int attempt = 0; attempt < kMaxAttempts && !accepted; ++attempt) {
                auto d = draw_cell(wanted, x0, y0, rng);
                b.kind = d.kind;
                b.rect = d.rect;
                b.features = std::move(d.features);
                const bool want_green = wanted == FeatureKind::Green || wanted == FeatureKind::Both;
                const bool want_solar = wanted == FeatureKind::Solar || wanted == FeatureKind::Both;
                const auto o = evaluate_cell(b, params, city.origin);
                accepted = !o.near_threshold && o.green == want_green && o.solar == want_solar;
            }
            if (!accepted) {
                b.kind = FeatureKind::None;
                b.rect = rect_at(x0 + kBuildingInset, y0 + kBuildingInset, 30, 30);
                b.features.clear();
            }
            b.expect_green = b.kind == FeatureKind::Green || b.kind == FeatureKind::Both;
            b.expect_solar = b.kind == FeatureKind::Solar || b.kind == FeatureKind::Both;
            city.buildings.push_back(std::move(b));
        }
    }

    std::vector<std::uint8_t> canvas(static_cast<std::size_t>(width) * height * 3);
    paint(canvas, width, {0, 0, width, height}, kGround);
    for (const auto& b : city.buildings) {
        paint(canvas, width, b.rect, kRoof);
        for (const auto& f : b.features)
            for (const auto& r : f.rects)
                paint(canvas, width, r,
                      f.typology == Typology::Green ? segment::kVegetationReference : segment::kPanelReference);
    }
    for (int ty = 0; ty < params.tiles_y; ++ty) {
        for (int tx = 0; tx < params.tiles_x; ++tx) {
            segment::RgbTile tile;
            tile.tile = {params.zoom, city.origin.x + tx, city.origin.y + ty};
            tilegrid::validate(tile.tile);
            tile.pixels.resize(static_cast<std::size_t>(kTileSize) * kTileSize * 3);
            for (int y = 0; y < kTileSize; ++y) {
                const auto src = canvas.begin() + ((static_cast<std::ptrdiff_t>(ty) * kTileSize + y) * width +
                                                   static_cast<std::ptrdiff_t>(tx) * kTileSize) * 3;
                std::copy(src, src + kTileSize * 3, tile.pixels.begin() + static_cast<std::ptrdiff_t>(y) * kTileSize * 3);
            }
            city.imagery.push_back(std::move(tile));
        }
    }

    nlohmann::json features = nlohmann::json::array();
    for (const auto& b : city.buildings) {
        auto corner = [&](int x, int y) { return tilegrid::pixel_to_geo(city.origin, x, y); };
        const auto& r = b.rect;
        geometry::GeoPolygon poly;
        poly.exterior = {corner(r.x0, r.y0), corner(r.x0, r.y1), corner(r.x1, r.y1), corner(r.x1, r.y0),
                         corner(r.x0, r.y0)};
        features.push_back({{"type", "Feature"},
                            {"id", b.id},
                            {"properties", {{"building", "yes"}, {"fixture_kind", to_string(b.kind)}}},
                            {"geometry", geojson::polygon_to_json(poly)}});
    }
    city.footprints = geojson::feature_collection(std::move(features));

    auto loaded = footprints::load_footprints(city.footprints);
    if (loaded.footprints.size() != city.buildings.size())
        throw DataError("synthetic footprints failed to load: " + (loaded.warnings.empty() ? std::string("?") : loaded.warnings.front()));
    std::map<std::string, const SyntheticBuilding*> by_id;
    for (const auto& b : city.buildings)
        by_id[b.id] = &b;
    for (auto& fp : loaded.footprints) {
        fp.green = by_id.at(fp.id)->expect_green;
        fp.solar = by_id.at(fp.id)->expect_solar;
    }
    city.truth.city = params.city;
    city.truth.footprints = std::move(loaded.footprints);
    tagging::recompute_totals(city.truth);
    return city;
}

void write_synthetic_city(const SyntheticCity& city, const fs::path& dir) {
    for (const auto& t : city.imagery) {
        image::RgbImage img{t.width, t.height, t.pixels};
        image::write_rgb_png(dir / "imagery" / geojson::tile_key(t.tile) += ".png", img);
    }
    geojson::write_file(dir / "footprints.geojson", city.footprints);
    geojson::write_file(dir / "truth.geojson", tagging::registry_polygons_json(city.truth));

    const auto& p = city.params;
    std::ofstream ini(dir / "city.ini");
    if (!ini)
        throw IoError("cannot write " + (dir / "city.ini").string());
    ini << "city = " << p.city << "\n"
        << "zoom = " << p.zoom << "\n"
        << "imagery_dir = imagery\n"
        << "mask_dir = masks\n"
        << "footprints = footprints.geojson\n"
        << "truth_green = truth.geojson\n"
        << "truth_solar = truth.geojson\n"
        << "out = out\n"
        << "min_pixels = " << p.min_pixels << "\n"
        << "min_overlap_m2 = " << p.tagging.min_overlap_m2 << "\n"
        << "min_overlap_ratio = " << p.tagging.min_overlap_ratio << "\n"
        << "min_compactness = " << p.tagging.min_compactness << "\n";
    if (!ini)
        throw IoError("cannot write " + (dir / "city.ini").string());
}

} // namespace roofpedia::synthetic
