#pragma once

#include "roofpedia/geometry.hpp"

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>
#include <boost/geometry/geometries/multi_polygon.hpp>
#include <boost/geometry/geometries/box.hpp>

namespace roofpedia::geometry::detail {

namespace bg = boost::geometry;

using BPoint = bg::model::d2::point_xy<double>;
using BPolygon = bg::model::polygon<BPoint, /*ClockWise=*/false, /*Closed=*/true>;
using BMultiPolygon = bg::model::multi_polygon<BPolygon>;
using BBox = bg::model::box<BPoint>;

BPolygon to_boost(const GeoPolygon& poly);
GeoPolygon from_boost(const BPolygon& poly);

inline BBox to_boost(const GeoBBox& b) { return BBox{BPoint{b.west, b.south}, BPoint{b.east, b.north}}; }

} // namespace roofpedia::geometry::detail
