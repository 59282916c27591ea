#pragma once

#include <cstdint>
#include <compare>
#include <vector>

namespace roofpedia::tilegrid {

inline constexpr int kMaxZoom = 22;
inline constexpr int kTileSize = 256;
inline constexpr double kEarthRadius = 6378137.0;       // WGS84 semi-major axis, Web Mercator sphere
inline constexpr double kMaxLatitude = 85.0511287798066; // atan(sinh(pi)) in degrees

/// Slippy Map tile address. Ordering is (zoom, x, y).
struct TileId {
    int zoom = 0;
    std::int64_t x = 0;
    std::int64_t y = 0;

    auto operator<=>(const TileId&) const = default;
};

/// Throws DomainError unless 0 <= zoom <= 22 and x, y lie inside the grid.
void validate(const TileId& t);

/// WGS84 position. Construct through make_point() to get the Mercator latitude clamp.
struct GeoPoint {
    double lon = 0.0;
    double lat = 0.0;

    auto operator<=>(const GeoPoint&) const = default;
};

/// Ingestion-time normalization: clamps latitude to the Mercator bound.
GeoPoint make_point(double lon, double lat);

struct GeoBBox {
    double west = 0.0;
    double south = 0.0;
    double east = 0.0;
    double north = 0.0;

    bool operator==(const GeoBBox&) const = default;

    bool contains(const GeoPoint& p) const {
        return p.lon >= west && p.lon <= east && p.lat >= south && p.lat <= north;
    }
    /// Half-open containment: the box owns its west and north edges.
    bool owns(const GeoPoint& p) const {
        return p.lon >= west && p.lon < east && p.lat <= north && p.lat > south;
    }
};

/// Throws DomainError for inverted, empty or non-finite boxes.
void validate(const GeoBBox& b);

TileId tile_of(const GeoPoint& p, int zoom);
GeoBBox tile_bounds(const TileId& t);

/// Pixel (0,0) is the northwest corner of the tile; (tile_size, tile_size) the southeast.
/// Interpolation happens in Mercator space, so shared edges of adjacent tiles map to
/// bit-identical coordinates.
GeoPoint pixel_to_geo(const TileId& t, double px, double py, int tile_size = kTileSize);

struct PixelCoord {
    double px = 0.0;
    double py = 0.0;
};
/// Inverse of pixel_to_geo (not clamped to the tile).
PixelCoord geo_to_pixel(const TileId& t, const GeoPoint& p, int tile_size = kTileSize);

/// Meters per pixel at the given latitude and zoom.
double ground_resolution(double lat, int zoom, int tile_size = kTileSize);

/// Tiles whose bounds overlap the box with positive area, sorted by (x, y).
std::vector<TileId> tiles_covering(const GeoBBox& bbox, int zoom);

// Web Mercator helpers on the unit square: u in [0,1] west->east, v in [0,1] north->south.
double lon_to_u(double lon);
double lat_to_v(double lat);
double u_to_lon(double u);
double v_to_lat(double v);

} // namespace roofpedia::tilegrid
