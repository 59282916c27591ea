#pragma once

#include "roofpedia/tilegrid.hpp"

#include <optional>
#include <string>
#include <vector>

namespace roofpedia::geometry {

using tilegrid::GeoBBox;
using tilegrid::GeoPoint;

/// Sphere radius used for every area and length in the project.
inline constexpr double kAuthalicRadius = 6371007.2;

/// Closed ring: first vertex == last vertex.
using Ring = std::vector<GeoPoint>;

/// After normalize(): exterior counter-clockwise (lon east, lat north), holes clockwise.
struct GeoPolygon {
    Ring exterior;
    std::vector<Ring> holes;

    bool operator==(const GeoPolygon&) const = default;
};

/// Signed spherical area of a ring in m^2 (positive when counter-clockwise),
/// summed edge by edge as the spherical excess of the edge-to-equator trapezoid.
double ring_signed_area_m2(const Ring& ring);

/// Exterior minus holes, independent of ring orientation.
double polygon_area_m2(const GeoPolygon& poly);

/// Great-circle length of a ring in metres.
double ring_length_m(const Ring& ring);
double perimeter_m(const GeoPolygon& poly);

/// 4*pi*area / perimeter^2: 1 for a circle, ~0.785 for a square, near 0 for slivers.
double compactness(const GeoPolygon& poly);

/// Closes rings, drops consecutive duplicate vertices and fixes orientation.
/// Returns false if a ring is left with fewer than 3 distinct vertices
/// (holes that degenerate are removed; a degenerate exterior fails).
bool normalize(GeoPolygon& poly);

GeoBBox bbox(const GeoPolygon& poly);
GeoBBox bbox(const Ring& ring);
bool bbox_intersects(const GeoBBox& a, const GeoBBox& b);
GeoBBox bbox_union(const GeoBBox& a, const GeoBBox& b);

/// Planar (lon/lat) area-weighted centroid.
GeoPoint centroid(const GeoPolygon& poly);

/// OGC validity (simple rings, holes inside the exterior, no crossings).
bool is_valid(const GeoPolygon& poly, std::string* reason = nullptr);

/// Spherical area of the overlay intersection, 0 when disjoint or only touching.
double intersection_area_m2(const GeoPolygon& a, const GeoPolygon& b);

/// True when the polygons share at least one point (touching included).
bool intersects(const GeoPolygon& a, const GeoPolygon& b);

/// Union of the polygons; may return several parts when they do not all connect.
std::vector<GeoPolygon> union_all(const std::vector<GeoPolygon>& polys);

/// Rounds every coordinate to the nearest multiple of grid degrees.
GeoPolygon snapped(const GeoPolygon& poly, double grid);

/// Lexicographically smallest vertex (lon, then lat) of the exterior; canonical sort key.
GeoPoint min_vertex(const GeoPolygon& poly);

} // namespace roofpedia::geometry
