#include "roofpedia/errors.hpp"
#include "roofpedia/vectorize.hpp"

#include "../support/oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace roofpedia;
using namespace roofpedia::vectorize;
using raster::BinaryMask;
using raster::ProbabilityMask;

namespace {

const TileId kTile{19, 274000, 183000};

BinaryMask square_mask(int x0, int y0, int side) {
    auto b = BinaryMask::zeros(kTile, 256, 256);
    for (int y = y0; y < y0 + side; ++y)
        for (int x = x0; x < x0 + side; ++x)
            b.at(x, y) = 1;
    return b;
}

ProbabilityMask to_prob(const BinaryMask& b) {
    ProbabilityMask m{b.tile, b.width, b.height, std::vector<float>(b.values.size())};
    for (std::size_t i = 0; i < b.values.size(); ++i)
        m.values[i] = b.values[i] ? 1.0f : 0.0f;
    return m;
}

// Ring area in pixel units from the traced rings (exterior minus holes).
double traced_area(const TracedPolygon& t) {
    double a = signed_area(t.exterior);
    for (const auto& h : t.holes)
        a += signed_area(h);
    return a;
}

// Largest distance of any original vertex from the simplified chain.
double max_deviation(const PixelRing& original, const PixelRing& simplified) {
    double worst = 0.0;
    for (const auto& p : original) {
        double best = 1e300;
        for (std::size_t i = 0; i + 1 < simplified.size(); ++i) {
            const auto& a = simplified[i];
            const auto& b = simplified[i + 1];
            const double dx = b.px - a.px, dy = b.py - a.py;
            const double len2 = dx * dx + dy * dy;
            double t = len2 == 0 ? 0 : ((p.px - a.px) * dx + (p.py - a.py) * dy) / len2;
            t = std::clamp(t, 0.0, 1.0);
            best = std::min(best, std::hypot(p.px - (a.px + t * dx), p.py - (a.py + t * dy)));
        }
        worst = std::max(worst, best);
    }
    return worst;
}

} // namespace

TEST_CASE("trace a filled square") {
    const auto traced = trace_contours(square_mask(100, 100, 10));
    REQUIRE(traced.size() == 1);
    CHECK(traced[0].exterior.size() == 5);
    CHECK(traced[0].holes.empty());
    CHECK(traced[0].pixel_count == 100);
    CHECK(signed_area(traced[0].exterior) == 100.0);
    const auto geo = georeference(traced[0], kTile);
    CHECK(oracle::count(oracle::rasterize({geo}, kTile)) == 100);
    CHECK(oracle::rasterize({geo}, kTile) == square_mask(100, 100, 10));
}

TEST_CASE("trace empty mask") { CHECK(trace_contours(BinaryMask::zeros(kTile, 256, 256)).empty()); }

TEST_CASE("trace square with hole") {
    auto b = square_mask(20, 20, 10);
    for (int y = 24; y < 26; ++y)
        for (int x = 24; x < 26; ++x)
            b.at(x, y) = 0;
    const auto traced = trace_contours(b);
    REQUIRE(traced.size() == 1);
    REQUIRE(traced[0].holes.size() == 1);
    CHECK(signed_area(traced[0].holes[0]) == -4.0);
    const auto geo = georeference(traced[0], kTile);
    CHECK(oracle::count(oracle::rasterize({geo}, kTile)) == 100 - 4);
    CHECK(oracle::rasterize({geo}, kTile) == b);
}

TEST_CASE("diagonal pinch: 8-connectivity joins, 4-connectivity splits") {
    auto b = BinaryMask::zeros(kTile, 8, 8);
    b.at(2, 2) = b.at(3, 3) = 1;
    const auto eight = trace_contours(b, 8);
    REQUIRE(eight.size() == 1);
    CHECK(eight[0].pixel_count == 2);
    CHECK(std::abs(traced_area(eight[0]) - 2.0) < 0.01);
    CHECK(trace_contours(b, 4).size() == 2);

    // Checkerboard-like block stays simple and georeferences to a valid polygon.
    auto c = BinaryMask::zeros(kTile, 256, 256);
    for (int y = 10; y < 20; ++y)
        for (int x = 10; x < 20; ++x)
            c.at(x, y) = (x + y) % 2;
    for (const auto& t : trace_contours(c, 8))
        CHECK(geometry::is_valid(georeference(t, kTile)));
}

TEST_CASE("traced rings rasterize back to random masks") {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 20; ++i) {
        const auto b = oracle::size_filter(oracle::threshold(oracle::random_mask(rng, kTile), 0.5), 1);
        std::vector<geometry::GeoPolygon> polys;
        std::int64_t pixels = 0;
        for (const auto& t : trace_contours(b, 8)) {
            polys.push_back(georeference(t, kTile));
            pixels += t.pixel_count;
            CHECK(geometry::is_valid(polys.back()));
        }
        CHECK(pixels == oracle::count(b));
        CHECK(oracle::rasterize(polys, kTile) == b);
    }
}

TEST_CASE("simplify") {
    const PixelRing rect = {{0, 0}, {10, 0}, {10, 5}, {0, 5}, {0, 0}};
    for (double tol : {0.0, 0.5, 1.0, 2.4}) {
        auto s = simplify(rect, tol);
        REQUIRE(s);
        CHECK(s->size() == 5);
        CHECK(std::abs(signed_area(*s)) == 50.0);
    }

    // Staircase of unit steps closed by a far corner.
    PixelRing stairs;
    for (int k = 0; k < 10; ++k) {
        stairs.push_back({double(k), double(k)});
        stairs.push_back({double(k + 1), double(k)});
    }
    stairs.push_back({10, 10});
    stairs.push_back({0, 10});
    stairs.push_back(stairs.front());
    auto s = simplify(stairs, 1.0);
    REQUIRE(s);
    CHECK(s->size() <= 5);
    CHECK(max_deviation(stairs, *s) <= 1.0);

    // Tolerance 0 only removes collinear vertices.
    const PixelRing collinear = {{0, 0}, {5, 0}, {10, 0}, {10, 5}, {0, 5}, {0, 0}};
    auto z = simplify(collinear, 0.0);
    REQUIRE(z);
    CHECK(z->size() == 5);
    CHECK_THROWS_AS(simplify(rect, -1.0), DomainError);
}

TEST_CASE("simplify keeps anchors") {
    PixelRing ring;
    for (int k = 0; k <= 20; ++k)
        ring.push_back({double(k), k % 2 ? 0.4 : 0.0});
    ring.push_back({20, 10});
    ring.push_back({0, 10});
    ring.push_back(ring.front());
    auto s = simplify(ring, 1.0, [](const PixelPoint& p) { return p.px == 7.0; });
    REQUIRE(s);
    CHECK(std::find(s->begin(), s->end(), PixelPoint{7, 0.4}) != s->end());
}

TEST_CASE("georeference") {
    const PixelRing corners = {{0, 0}, {0, 256}, {256, 256}, {256, 0}, {0, 0}};
    const auto g = georeference(corners, kTile);
    const auto b = tilegrid::tile_bounds(kTile);
    CHECK(g.exterior.size() == corners.size());
    for (const auto& p : g.exterior) {
        CHECK((p.lon == b.west || p.lon == b.east));
        CHECK((p.lat == b.north || p.lat == b.south));
    }
    const TileId eq{19, 262144, 262143};
    const PixelRing sq = {{0, 246}, {10, 246}, {10, 256}, {0, 256}, {0, 246}};
    const double want = std::pow(10 * tilegrid::ground_resolution(0, 19), 2);
    CHECK(std::abs(geometry::polygon_area_m2(georeference(sq, eq)) - want) / want < 0.01);
}

TEST_CASE("vectorize_tile") {
    VectorizeParams p;
    CHECK(vectorize_tile(kTile, to_prob(BinaryMask::zeros(kTile, 256, 256)), Typology::Solar, p).empty());

    auto b = square_mask(30, 30, 12);
    const auto one = vectorize_tile(kTile, to_prob(b), Typology::Solar, p);
    REQUIRE(one.size() == 1);
    CHECK(one[0].pixel_area == 144);
    CHECK(one[0].typology == Typology::Solar);
    CHECK(one[0].source_tiles == std::vector<TileId>{kTile});

    for (int y = 100; y < 105; ++y)
        for (int x = 100; x < 105; ++x)
            b.at(x, y) = 1; // 25 px, below min_pixels
    CHECK(vectorize_tile(kTile, to_prob(b), Typology::Solar, p).size() == 1);

    CHECK_THROWS_AS(vectorize_tile({19, 0, 0}, to_prob(b), Typology::Solar, p), DomainError);
    p.threshold = 1.0;
    CHECK_THROWS_AS(vectorize_tile(kTile, to_prob(b), Typology::Solar, p), DomainError);
}

TEST_CASE("merge across tiles") {
    // Rectangle painted across a 2x2 block of tiles.
    std::vector<ProbabilityMask> masks;
    for (int dy = 0; dy < 2; ++dy)
        for (int dx = 0; dx < 2; ++dx) {
            const TileId t{19, kTile.x + dx, kTile.y + dy};
            auto b = BinaryMask::zeros(t, 256, 256);
            for (int y = 0; y < 256; ++y)
                for (int x = 0; x < 256; ++x) {
                    const int gx = dx * 256 + x, gy = dy * 256 + y;
                    b.at(x, y) = gx >= 200 && gx < 320 && gy >= 220 && gy < 300;
                }
            masks.push_back(to_prob(b));
        }
    const auto merged = vectorize_tiles(masks, Typology::Green, {}, 2);
    REQUIRE(merged.size() == 1);
    CHECK(merged[0].pixel_area == 120 * 80);
    CHECK(merged[0].source_tiles.size() == 4);
    CHECK(merged[0].geometry.holes.empty());
    CHECK(geometry::is_valid(merged[0].geometry));
    CHECK(merged == vectorize_tiles_serial(masks, Typology::Green, {}));
    std::reverse(masks.begin(), masks.end());
    CHECK(merged == vectorize_tiles(masks, Typology::Green, {}, 3));

    double parts = 0;
    for (const auto& m : masks)
        for (const auto& p : vectorize_tile(m.tile, m, Typology::Green, {}))
            parts += p.geo_area_m2;
    // Vertices are snapped to a 1e-9 degree grid before the union.
    CHECK(merged[0].geo_area_m2 == doctest::Approx(parts).epsilon(1e-4));
}

TEST_CASE("merge keeps separate polygons apart") {
    const auto a = geometry::GeoPolygon{{{0, 0}, {1e-4, 0}, {1e-4, 1e-4}, {0, 1e-4}, {0, 0}}, {}};
    const auto b = geometry::GeoPolygon{{{5e-4, 0}, {6e-4, 0}, {6e-4, 1e-4}, {5e-4, 1e-4}, {5e-4, 0}}, {}};
    std::vector<PredictionPolygon> in = {{Typology::Green, b, {}, 1, 1.0}, {Typology::Green, a, {}, 1, 1.0}};
    const auto out = merge_cross_tile(in);
    REQUIRE(out.size() == 2);
    CHECK(out[0].geometry == a);
    in.push_back({Typology::Solar, a, {}, 1, 1.0});
    CHECK_THROWS_AS(merge_cross_tile(in), DomainError);
}
