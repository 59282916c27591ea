#include "roofpedia/vectorize.hpp"

#include "roofpedia/errors.hpp"
#include "roofpedia/parallel.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numeric>

namespace roofpedia::vectorize {

namespace {

// Edge directions in image space (y grows southwards).
enum Dir : std::uint8_t { East = 0, South = 1, West = 2, North = 3 };
constexpr std::array<int, 4> kDx = {1, 0, -1, 0};
constexpr std::array<int, 4> kDy = {0, 1, 0, -1};

constexpr int turn_left(int d) { return (d + 3) % 4; }
constexpr int turn_right(int d) { return (d + 1) % 4; }

double segment_distance(const PixelPoint& p, const PixelPoint& a, const PixelPoint& b) {
    const double vx = b.px - a.px;
    const double vy = b.py - a.py;
    const double wx = p.px - a.px;
    const double wy = p.py - a.py;
    const double len2 = vx * vx + vy * vy;
    double t = len2 > 0.0 ? (wx * vx + wy * vy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double dx = wx - t * vx;
    const double dy = wy - t * vy;
    return std::sqrt(dx * dx + dy * dy);
}

double distance(const PixelPoint& a, const PixelPoint& b) { return std::hypot(a.px - b.px, a.py - b.py); }

// Keeps the farthest vertex of the open chain ring[first..last] (cyclic indices) while it
// deviates more than tolerance from the chord.
void douglas_peucker(const std::vector<PixelPoint>& pts, std::size_t first, std::size_t length, double tolerance,
                     std::vector<bool>& keep) {
    const std::size_t n = pts.size();
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, length}};
    while (!stack.empty()) {
        const auto [s, e] = stack.back();
        stack.pop_back();
        if (e <= s + 1)
            continue;
        const auto& a = pts[(first + s) % n];
        const auto& b = pts[(first + e) % n];
        double best = -1.0;
        std::size_t best_t = s;
        for (std::size_t t = s + 1; t < e; ++t) {
            const double d = segment_distance(pts[(first + t) % n], a, b);
            if (d > best) {
                best = d;
                best_t = t;
            }
        }
        if (best > tolerance) {
            keep[(first + best_t) % n] = true;
            stack.emplace_back(s, best_t);
            stack.emplace_back(best_t, e);
        }
    }
}

std::size_t farthest_from(const std::vector<PixelPoint>& pts, std::size_t from) {
    std::size_t best = from;
    double best_d = -1.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double d = distance(pts[i], pts[from]);
        if (d > best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

PixelRing close_and_rotate(std::vector<PixelPoint> pts) {
    const auto first = std::min_element(pts.begin(), pts.end());
    std::rotate(pts.begin(), first, pts.end());
    pts.push_back(pts.front());
    return pts;
}

} // namespace

double signed_area(const PixelRing& ring) {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i)
        sum += ring[i].px * ring[i + 1].py - ring[i + 1].px * ring[i].py;
    return sum / 2.0;
}

std::vector<TracedPolygon> trace_contours(const raster::BinaryMask& b, int connectivity) {
    const auto components = raster::connected_components(b, connectivity);
    const int w = b.width;
    const int h = b.height;
    const int vw = w + 1;
    auto fg = [&](int x, int y) { return b.inside(x, y) && b.at(x, y) != 0; };
    auto vertex = [vw](int x, int y) { return static_cast<std::size_t>(y) * vw + x; };

    std::vector<std::uint8_t> out(static_cast<std::size_t>(vw) * (h + 1), 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!fg(x, y))
                continue;
            if (!fg(x, y - 1))
                out[vertex(x, y)] |= 1u << East;
            if (!fg(x + 1, y))
                out[vertex(x + 1, y)] |= 1u << South;
            if (!fg(x, y + 1))
                out[vertex(x + 1, y + 1)] |= 1u << West;
            if (!fg(x - 1, y))
                out[vertex(x, y + 1)] |= 1u << North;
        }
    }

    std::vector<std::uint8_t> visited(out.size(), 0);
    std::vector<TracedPolygon> polys(static_cast<std::size_t>(components.count()));
    for (std::int32_t i = 0; i < components.count(); ++i)
        polys[i].pixel_count = components.sizes[i];

    for (int vy = 0; vy <= h; ++vy) {
        for (int vx = 0; vx <= w; ++vx) {
            for (int d0 = 0; d0 < 4; ++d0) {
                const auto v0 = vertex(vx, vy);
                if (!(out[v0] & (1u << d0)) || (visited[v0] & (1u << d0)))
                    continue;

                // Pixel on the right-hand side of the starting edge owns the ring.
                int ox = vx, oy = vy;
                if (d0 == South)
                    ox -= 1;
                else if (d0 == West) {
                    ox -= 1;
                    oy -= 1;
                } else if (d0 == North)
                    oy -= 1;
                const auto label = components.label_at(ox, oy);

                std::vector<PixelPoint> pts;
                visited[v0] |= static_cast<std::uint8_t>(1u << d0);
                int cx = vx + kDx[d0];
                int cy = vy + kDy[d0];
                int din = d0;
                while (true) {
                    const auto cv = vertex(cx, cy);
                    const auto outs = out[cv];
                    int dout;
                    const bool pinch = std::popcount(static_cast<unsigned>(outs)) == 2;
                    if (pinch)
                        dout = connectivity == 8 ? turn_left(din) : turn_right(din);
                    else
                        dout = std::countr_zero(static_cast<unsigned>(outs));
                    if (dout != din) {
                        if (pinch) {
                            pts.push_back({cx - kPinchChamfer * kDx[din], cy - kPinchChamfer * kDy[din]});
                            pts.push_back({cx + kPinchChamfer * kDx[dout], cy + kPinchChamfer * kDy[dout]});
                        } else {
                            pts.push_back({static_cast<double>(cx), static_cast<double>(cy)});
                        }
                    }
                    if (cv == v0 && dout == d0)
                        break;
                    visited[cv] |= static_cast<std::uint8_t>(1u << dout);
                    cx += kDx[dout];
                    cy += kDy[dout];
                    din = dout;
                }

                auto ring = close_and_rotate(std::move(pts));
                auto& poly = polys[label - 1];
                if (signed_area(ring) > 0.0)
                    poly.exterior = std::move(ring);
                else
                    poly.holes.push_back(std::move(ring));
            }
        }
    }
    return polys;
}

std::optional<PixelRing> simplify(const PixelRing& ring, double tolerance_px) {
    return simplify(ring, tolerance_px, [](const PixelPoint&) { return false; });
}

std::optional<PixelRing> simplify(const PixelRing& ring, double tolerance_px,
                                  const std::function<bool(const PixelPoint&)>& anchor) {
    if (!(tolerance_px >= 0.0))
        throw DomainError("simplification tolerance must be non-negative");
    std::vector<PixelPoint> pts(ring.begin(), ring.end());
    if (pts.size() > 1 && pts.front() == pts.back())
        pts.pop_back();
    const std::size_t n = pts.size();
    if (n < 3)
        return std::nullopt;

    std::vector<std::size_t> anchors;
    for (std::size_t i = 0; i < n; ++i)
        if (anchor(pts[i]))
            anchors.push_back(i);
    if (anchors.empty())
        anchors.push_back(0);
    if (anchors.size() == 1) {
        anchors.push_back(farthest_from(pts, anchors.front()));
        std::sort(anchors.begin(), anchors.end());
        if (anchors[0] == anchors[1])
            return std::nullopt;
    }

    std::vector<bool> keep(n, false);
    for (auto a : anchors)
        keep[a] = true;
    for (std::size_t k = 0; k < anchors.size(); ++k) {
        const auto first = anchors[k];
        const auto last = anchors[(k + 1) % anchors.size()];
        const auto length = (last + n - first) % n;
        douglas_peucker(pts, first, length == 0 ? n : length, tolerance_px, keep);
    }

    std::vector<PixelPoint> kept;
    for (std::size_t i = 0; i < n; ++i)
        if (keep[i] && (kept.empty() || !(kept.back() == pts[i])))
            kept.push_back(pts[i]);
    while (kept.size() > 1 && kept.front() == kept.back())
        kept.pop_back();
    if (kept.size() < 3)
        return std::nullopt;
    kept.push_back(kept.front());
    return kept;
}

GeoPolygon georeference(const PixelRing& ring, const TileId& tile, int tile_size) {
    GeoPolygon poly;
    poly.exterior.reserve(ring.size());
    for (const auto& p : ring)
        poly.exterior.push_back(tilegrid::pixel_to_geo(tile, p.px, p.py, tile_size));
    geometry::normalize(poly);
    return poly;
}

GeoPolygon georeference(const TracedPolygon& traced, const TileId& tile, int tile_size) {
    GeoPolygon poly = georeference(traced.exterior, tile, tile_size);
    for (const auto& hole : traced.holes) {
        geometry::Ring geo;
        geo.reserve(hole.size());
        for (const auto& p : hole)
            geo.push_back(tilegrid::pixel_to_geo(tile, p.px, p.py, tile_size));
        poly.holes.push_back(std::move(geo));
    }
    geometry::normalize(poly);
    return poly;
}

void validate(const VectorizeParams& params) {
    if (!(params.threshold > 0.0 && params.threshold < 1.0))
        throw DomainError("threshold must lie in (0, 1)");
    if (params.min_pixels < 0)
        throw DomainError("min_pixels must be non-negative");
    if (!(params.tolerance_px >= 0.0))
        throw DomainError("simplification tolerance must be non-negative");
    if (params.connectivity != 4 && params.connectivity != 8)
        throw DomainError("connectivity must be 4 or 8");
}

std::vector<PredictionPolygon> vectorize_tile(const TileId& tile, const raster::ProbabilityMask& mask,
                                              Typology typology, const VectorizeParams& params) {
    validate(params);
    if (!(mask.tile == tile))
        throw DomainError("mask does not belong to the requested tile");
    const auto binary = raster::threshold(mask, params.threshold);
    const auto cleaned =
        raster::despeckle(raster::connected_components(binary, params.connectivity), params.min_pixels);
    const auto traced = trace_contours(cleaned, params.connectivity);

    const int w = mask.width;
    const int h = mask.height;
    const auto on_border = [w, h](const PixelPoint& p) {
        return p.px == 0.0 || p.py == 0.0 || p.px == w || p.py == h;
    };
    // Non-square masks are georeferenced on the width; tiles are square in practice.
    const int tile_size = w;

    std::vector<PredictionPolygon> out;
    out.reserve(traced.size());
    for (const auto& component : traced) {
        double tolerance = params.tolerance_px;
        while (true) {
            auto exterior = simplify(component.exterior, tolerance, on_border);
            bool accepted = false;
            if (exterior) {
                TracedPolygon simplified{std::move(*exterior), {}, component.pixel_count};
                for (const auto& hole : component.holes)
                    if (auto s = simplify(hole, tolerance, on_border))
                        simplified.holes.push_back(std::move(*s));
                auto geo = georeference(simplified, tile, tile_size);
                if (tolerance == 0.0 || geometry::is_valid(geo)) {
                    const double area = geometry::polygon_area_m2(geo);
                    if (area > 0.0)
                        out.push_back(PredictionPolygon{typology, std::move(geo), {tile}, component.pixel_count, area});
                    accepted = true;
                }
            } else if (tolerance == 0.0) {
                accepted = true; // degenerate even unsimplified; cannot happen for traced rings
            }
            if (accepted)
                break;
            tolerance = tolerance / 2.0 < 1.0 / 16.0 ? 0.0 : tolerance / 2.0;
        }
    }
    return out;
}

void sort_canonical(std::vector<PredictionPolygon>& polys) {
    std::sort(polys.begin(), polys.end(), [](const PredictionPolygon& a, const PredictionPolygon& b) {
        if (a.typology != b.typology)
            return a.typology < b.typology;
        const auto ma = geometry::min_vertex(a.geometry);
        const auto mb = geometry::min_vertex(b.geometry);
        if (!(ma == mb))
            return ma < mb;
        if (a.pixel_area != b.pixel_area)
            return a.pixel_area < b.pixel_area;
        return a.geometry.exterior < b.geometry.exterior;
    });
}

std::vector<PredictionPolygon> merge_cross_tile(std::vector<PredictionPolygon> polys) {
    if (polys.empty())
        return polys;
    for (const auto& p : polys)
        if (p.typology != polys.front().typology)
            throw DomainError("merge_cross_tile requires a single typology");

    sort_canonical(polys);
    const std::size_t n = polys.size();
    std::vector<geometry::GeoPolygon> snapped(n);
    std::vector<tilegrid::GeoBBox> boxes(n);
    for (std::size_t i = 0; i < n; ++i) {
        snapped[i] = geometry::snapped(polys[i].geometry, kMergeSnapDegrees);
        boxes[i] = geometry::bbox(snapped[i]);
    }

    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t a) {
        while (parent[a] != a)
            a = parent[a] = parent[parent[a]];
        return a;
    };

    // Sweep over west edges; only bbox-touching pairs reach the exact test.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return boxes[a].west < boxes[b].west; });
    for (std::size_t oi = 0; oi < n; ++oi) {
        const auto i = order[oi];
        for (std::size_t oj = oi + 1; oj < n && boxes[order[oj]].west <= boxes[i].east; ++oj) {
            const auto j = order[oj];
            if (!geometry::bbox_intersects(boxes[i], boxes[j]) || find(i) == find(j))
                continue;
            if (geometry::intersects(snapped[i], snapped[j])) {
                const auto ri = find(i);
                const auto rj = find(j);
                parent[std::max(ri, rj)] = std::min(ri, rj);
            }
        }
    }

    std::vector<std::vector<std::size_t>> groups(n);
    for (std::size_t i = 0; i < n; ++i)
        groups[find(i)].push_back(i);

    std::vector<PredictionPolygon> out;
    out.reserve(n);
    for (const auto& group : groups) {
        if (group.empty())
            continue;
        if (group.size() == 1) {
            out.push_back(std::move(polys[group.front()]));
            continue;
        }
        std::vector<geometry::GeoPolygon> parts;
        for (auto i : group)
            parts.push_back(snapped[i]);
        auto merged = geometry::union_all(parts);
        if (merged.size() != 1) {
            // Members only meet at isolated points; keep them apart.
            for (auto i : group)
                out.push_back(std::move(polys[i]));
            continue;
        }
        PredictionPolygon p;
        p.typology = polys[group.front()].typology;
        for (auto i : group) {
            p.pixel_area += polys[i].pixel_area;
            p.source_tiles.insert(p.source_tiles.end(), polys[i].source_tiles.begin(), polys[i].source_tiles.end());
        }
        std::sort(p.source_tiles.begin(), p.source_tiles.end());
        p.source_tiles.erase(std::unique(p.source_tiles.begin(), p.source_tiles.end()), p.source_tiles.end());
        p.geometry = std::move(merged.front());
        p.geo_area_m2 = geometry::polygon_area_m2(p.geometry);
        out.push_back(std::move(p));
    }
    sort_canonical(out);
    return out;
}

std::vector<PredictionPolygon> vectorize_tiles(std::span<const raster::ProbabilityMask> masks, Typology typology,
                                               const VectorizeParams& params, int workers) {
    validate(params);
    std::vector<std::vector<PredictionPolygon>> per_tile(masks.size());
    parallel::for_each_index(masks.size(), workers, [&](std::size_t i) {
        per_tile[i] = vectorize_tile(masks[i].tile, masks[i], typology, params);
    });
    std::vector<PredictionPolygon> all;
    for (auto& tile_polys : per_tile)
        std::move(tile_polys.begin(), tile_polys.end(), std::back_inserter(all));
    return merge_cross_tile(std::move(all));
}

std::vector<PredictionPolygon> vectorize_tiles_serial(std::span<const raster::ProbabilityMask> masks,
                                                      Typology typology, const VectorizeParams& params) {
    validate(params);
    std::vector<PredictionPolygon> all;
    for (const auto& mask : masks) {
        auto polys = vectorize_tile(mask.tile, mask, typology, params);
        std::move(polys.begin(), polys.end(), std::back_inserter(all));
    }
    return merge_cross_tile(std::move(all));
}

} // namespace roofpedia::vectorize
