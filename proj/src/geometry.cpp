#include "roofpedia/geometry.hpp"

#include "boost_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace roofpedia::geometry {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

bool close_ring(Ring& ring) {
    // Drop consecutive duplicates, then close.
    Ring out;
    out.reserve(ring.size() + 1);
    for (const auto& p : ring)
        if (out.empty() || !(out.back() == p))
            out.push_back(p);
    while (out.size() > 1 && out.front() == out.back())
        out.pop_back();
    if (out.size() < 3)
        return false;
    out.push_back(out.front());
    ring = std::move(out);
    return true;
}

} // namespace

double ring_signed_area_m2(const Ring& ring) {
    if (ring.size() < 4)
        return 0.0;
    double excess = 0.0;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        const double lon1 = ring[i].lon * kDegToRad;
        const double lon2 = ring[i + 1].lon * kDegToRad;
        const double t1 = std::tan(ring[i].lat * kDegToRad / 2.0);
        const double t2 = std::tan(ring[i + 1].lat * kDegToRad / 2.0);
        excess += 2.0 * std::atan2(std::tan((lon2 - lon1) / 2.0) * (t1 + t2), 1.0 + t1 * t2);
    }
    // The edge-to-equator excess accumulates negatively for counter-clockwise rings.
    return -excess * kAuthalicRadius * kAuthalicRadius;
}

double polygon_area_m2(const GeoPolygon& poly) {
    double area = std::abs(ring_signed_area_m2(poly.exterior));
    for (const auto& hole : poly.holes)
        area -= std::abs(ring_signed_area_m2(hole));
    return std::max(area, 0.0);
}

double ring_length_m(const Ring& ring) {
    double length = 0.0;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        const double phi1 = ring[i].lat * kDegToRad;
        const double phi2 = ring[i + 1].lat * kDegToRad;
        const double dphi = phi2 - phi1;
        const double dlambda = (ring[i + 1].lon - ring[i].lon) * kDegToRad;
        const double h = std::sin(dphi / 2) * std::sin(dphi / 2) +
                         std::cos(phi1) * std::cos(phi2) * std::sin(dlambda / 2) * std::sin(dlambda / 2);
        length += 2.0 * std::asin(std::min(1.0, std::sqrt(h)));
    }
    return length * kAuthalicRadius;
}

double perimeter_m(const GeoPolygon& poly) {
    double p = ring_length_m(poly.exterior);
    for (const auto& hole : poly.holes)
        p += ring_length_m(hole);
    return p;
}

double compactness(const GeoPolygon& poly) {
    const double p = perimeter_m(poly);
    if (p <= 0.0)
        return 0.0;
    return 4.0 * std::numbers::pi * polygon_area_m2(poly) / (p * p);
}

bool normalize(GeoPolygon& poly) {
    if (!close_ring(poly.exterior))
        return false;
    if (ring_signed_area_m2(poly.exterior) < 0.0)
        std::reverse(poly.exterior.begin(), poly.exterior.end());
    std::vector<Ring> holes;
    for (auto& hole : poly.holes) {
        if (!close_ring(hole))
            continue;
        if (ring_signed_area_m2(hole) > 0.0)
            std::reverse(hole.begin(), hole.end());
        holes.push_back(std::move(hole));
    }
    poly.holes = std::move(holes);
    return true;
}

GeoBBox bbox(const Ring& ring) {
    GeoBBox b{ring.front().lon, ring.front().lat, ring.front().lon, ring.front().lat};
    for (const auto& p : ring) {
        b.west = std::min(b.west, p.lon);
        b.east = std::max(b.east, p.lon);
        b.south = std::min(b.south, p.lat);
        b.north = std::max(b.north, p.lat);
    }
    return b;
}

GeoBBox bbox(const GeoPolygon& poly) { return bbox(poly.exterior); }

bool bbox_intersects(const GeoBBox& a, const GeoBBox& b) {
    return a.west <= b.east && b.west <= a.east && a.south <= b.north && b.south <= a.north;
}

GeoBBox bbox_union(const GeoBBox& a, const GeoBBox& b) {
    return GeoBBox{std::min(a.west, b.west), std::min(a.south, b.south), std::max(a.east, b.east),
                   std::max(a.north, b.north)};
}

GeoPoint centroid(const GeoPolygon& poly) {
    detail::BPoint c(0.0, 0.0);
    detail::bg::centroid(detail::to_boost(poly), c);
    return GeoPoint{c.x(), c.y()};
}

bool is_valid(const GeoPolygon& poly, std::string* reason) {
    const auto b = detail::to_boost(poly);
    if (reason) {
        std::string message;
        const bool ok = detail::bg::is_valid(b, message);
        *reason = message;
        return ok;
    }
    return detail::bg::is_valid(b);
}

double intersection_area_m2(const GeoPolygon& a, const GeoPolygon& b) {
    if (!bbox_intersects(bbox(a), bbox(b)))
        return 0.0;
    detail::BMultiPolygon out;
    detail::bg::intersection(detail::to_boost(a), detail::to_boost(b), out);
    double area = 0.0;
    for (const auto& part : out)
        area += polygon_area_m2(detail::from_boost(part));
    return area;
}

bool intersects(const GeoPolygon& a, const GeoPolygon& b) {
    if (!bbox_intersects(bbox(a), bbox(b)))
        return false;
    return detail::bg::intersects(detail::to_boost(a), detail::to_boost(b));
}

std::vector<GeoPolygon> union_all(const std::vector<GeoPolygon>& polys) {
    detail::BMultiPolygon acc;
    for (const auto& p : polys) {
        detail::BMultiPolygon next;
        detail::bg::union_(acc, detail::to_boost(p), next);
        acc = std::move(next);
    }
    std::vector<GeoPolygon> out;
    out.reserve(acc.size());
    for (const auto& part : acc) {
        auto g = detail::from_boost(part);
        if (normalize(g))
            out.push_back(std::move(g));
    }
    return out;
}

GeoPolygon snapped(const GeoPolygon& poly, double grid) {
    auto snap_ring = [grid](const Ring& ring) {
        Ring out;
        out.reserve(ring.size());
        for (const auto& p : ring)
            out.push_back(GeoPoint{std::round(p.lon / grid) * grid, std::round(p.lat / grid) * grid});
        return out;
    };
    GeoPolygon out{snap_ring(poly.exterior), {}};
    for (const auto& hole : poly.holes)
        out.holes.push_back(snap_ring(hole));
    return out;
}

GeoPoint min_vertex(const GeoPolygon& poly) {
    return *std::min_element(poly.exterior.begin(), poly.exterior.end());
}

namespace detail {

BPolygon to_boost(const GeoPolygon& poly) {
    BPolygon out;
    out.outer().reserve(poly.exterior.size());
    for (const auto& p : poly.exterior)
        out.outer().emplace_back(p.lon, p.lat);
    for (const auto& hole : poly.holes) {
        out.inners().emplace_back();
        out.inners().back().reserve(hole.size());
        for (const auto& p : hole)
            out.inners().back().emplace_back(p.lon, p.lat);
    }
    return out;
}

GeoPolygon from_boost(const BPolygon& poly) {
    GeoPolygon out;
    out.exterior.reserve(poly.outer().size());
    for (const auto& p : poly.outer())
        out.exterior.push_back(GeoPoint{p.x(), p.y()});
    for (const auto& inner : poly.inners()) {
        Ring hole;
        hole.reserve(inner.size());
        for (const auto& p : inner)
            hole.push_back(GeoPoint{p.x(), p.y()});
        out.holes.push_back(std::move(hole));
    }
    return out;
}

} // namespace detail

} // namespace roofpedia::geometry
