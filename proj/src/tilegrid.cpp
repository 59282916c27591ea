#include "roofpedia/tilegrid.hpp"

#include "roofpedia/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace roofpedia::tilegrid {

namespace {

constexpr double kPi = std::numbers::pi;

double grid_extent(int zoom) { return std::ldexp(1.0, zoom); }

void check_zoom(int zoom) {
    if (zoom < 0 || zoom > kMaxZoom)
        throw DomainError("zoom out of range [0, 22]: " + std::to_string(zoom));
}

std::int64_t clamp_index(double value, int zoom) {
    const auto n = static_cast<std::int64_t>(1) << zoom;
    const auto i = static_cast<std::int64_t>(std::floor(value));
    return std::clamp<std::int64_t>(i, 0, n - 1);
}

} // namespace

void validate(const TileId& t) {
    check_zoom(t.zoom);
    const auto n = static_cast<std::int64_t>(1) << t.zoom;
    if (t.x < 0 || t.x >= n || t.y < 0 || t.y >= n)
        throw DomainError("tile index outside grid at zoom " + std::to_string(t.zoom));
}

GeoPoint make_point(double lon, double lat) {
    return GeoPoint{lon, std::clamp(lat, -kMaxLatitude, kMaxLatitude)};
}

void validate(const GeoBBox& b) {
    const bool finite = std::isfinite(b.west) && std::isfinite(b.east) && std::isfinite(b.south) &&
                        std::isfinite(b.north);
    if (!finite || !(b.west < b.east) || !(b.south < b.north))
        throw DomainError("bounding box must satisfy west < east and south < north");
}

double lon_to_u(double lon) { return (lon + 180.0) / 360.0; }

double lat_to_v(double lat) {
    const double phi = lat * kPi / 180.0;
    return (1.0 - std::asinh(std::tan(phi)) / kPi) / 2.0;
}

double u_to_lon(double u) { return u * 360.0 - 180.0; }

double v_to_lat(double v) { return std::atan(std::sinh(kPi * (1.0 - 2.0 * v))) * 180.0 / kPi; }

TileId tile_of(const GeoPoint& p, int zoom) {
    check_zoom(zoom);
    if (!std::isfinite(p.lon) || !std::isfinite(p.lat))
        throw DomainError("non-finite coordinate");
    if (std::abs(p.lat) > kMaxLatitude)
        throw DomainError("latitude outside Web Mercator bounds: " + std::to_string(p.lat));
    if (p.lon < -180.0 || p.lon > 180.0)
        throw DomainError("longitude outside [-180, 180]: " + std::to_string(p.lon));
    const double n = grid_extent(zoom);
    return TileId{zoom, clamp_index(lon_to_u(p.lon) * n, zoom), clamp_index(lat_to_v(p.lat) * n, zoom)};
}

GeoPoint pixel_to_geo(const TileId& t, double px, double py, int tile_size) {
    const double span = static_cast<double>(tile_size) * grid_extent(t.zoom);
    const double gx = static_cast<double>(t.x) * tile_size + px;
    const double gy = static_cast<double>(t.y) * tile_size + py;
    return GeoPoint{u_to_lon(gx / span), v_to_lat(gy / span)};
}

PixelCoord geo_to_pixel(const TileId& t, const GeoPoint& p, int tile_size) {
    const double span = static_cast<double>(tile_size) * grid_extent(t.zoom);
    return PixelCoord{lon_to_u(p.lon) * span - static_cast<double>(t.x) * tile_size,
                      lat_to_v(p.lat) * span - static_cast<double>(t.y) * tile_size};
}

GeoBBox tile_bounds(const TileId& t) {
    validate(t);
    const GeoPoint nw = pixel_to_geo(t, 0.0, 0.0, 1);
    const GeoPoint se = pixel_to_geo(t, 1.0, 1.0, 1);
    return GeoBBox{nw.lon, se.lat, se.lon, nw.lat};
}

double ground_resolution(double lat, int zoom, int tile_size) {
    check_zoom(zoom);
    if (std::abs(lat) > kMaxLatitude + 1e-9)
        throw DomainError("latitude outside Web Mercator bounds");
    return 2.0 * kPi * kEarthRadius / (static_cast<double>(tile_size) * grid_extent(zoom)) *
           std::cos(lat * kPi / 180.0);
}

std::vector<TileId> tiles_covering(const GeoBBox& bbox, int zoom) {
    check_zoom(zoom);
    validate(bbox);
    const double n = grid_extent(zoom);
    const auto max_index = static_cast<std::int64_t>(1) << zoom;
    const double north = std::min(bbox.north, kMaxLatitude);
    const double south = std::max(bbox.south, -kMaxLatitude);
    const double west = std::max(bbox.west, -180.0);
    const double east = std::min(bbox.east, 180.0);

    // Closed-form range widened by one, then filtered on exact tile bounds.
    const std::int64_t x0 = std::max<std::int64_t>(0, clamp_index(lon_to_u(west) * n, zoom) - 1);
    const std::int64_t x1 = std::min(max_index - 1, clamp_index(lon_to_u(east) * n, zoom) + 1);
    const std::int64_t y0 = std::max<std::int64_t>(0, clamp_index(lat_to_v(north) * n, zoom) - 1);
    const std::int64_t y1 = std::min(max_index - 1, clamp_index(lat_to_v(south) * n, zoom) + 1);

    std::vector<TileId> out;
    for (std::int64_t x = x0; x <= x1; ++x) {
        const GeoBBox column = tile_bounds(TileId{zoom, x, 0});
        if (!(column.west < bbox.east && column.east > bbox.west))
            continue;
        for (std::int64_t y = y0; y <= y1; ++y) {
            const GeoBBox b = tile_bounds(TileId{zoom, x, y});
            if (b.south < bbox.north && b.north > bbox.south)
                out.push_back(TileId{zoom, x, y});
        }
    }
    return out;
}

} // namespace roofpedia::tilegrid
