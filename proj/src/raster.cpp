#include "roofpedia/raster.hpp"

#include "roofpedia/errors.hpp"

#include <algorithm>
#include <numeric>

namespace roofpedia::raster {

namespace {

void check_dims(int width, int height, std::size_t n) {
    if (width <= 0 || height <= 0 || static_cast<std::size_t>(width) * height != n)
        throw DomainError("mask dimensions do not match value buffer");
}

// Union-find with path halving; parent[i] <= i always, so roots are the smallest label.
struct Equivalence {
    std::vector<std::int32_t> parent{0};

    std::int32_t make() {
        parent.push_back(static_cast<std::int32_t>(parent.size()));
        return parent.back();
    }
    std::int32_t find(std::int32_t a) {
        while (parent[a] != a) {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        return a;
    }
    void unite(std::int32_t a, std::int32_t b) {
        a = find(a);
        b = find(b);
        if (a == b)
            return;
        if (a < b)
            parent[b] = a;
        else
            parent[a] = b;
    }
};

} // namespace

BinaryMask BinaryMask::zeros(TileId tile, int width, int height) {
    return BinaryMask{tile, width, height, std::vector<std::uint8_t>(static_cast<std::size_t>(width) * height, 0)};
}

std::int64_t BinaryMask::count() const {
    return std::count_if(values.begin(), values.end(), [](std::uint8_t v) { return v != 0; });
}

void validate(const ProbabilityMask& m) {
    check_dims(m.width, m.height, m.values.size());
    for (float v : m.values)
        if (!(v >= 0.0f && v <= 1.0f))
            throw DomainError("probability outside [0, 1]");
}

void validate(const BinaryMask& b) {
    check_dims(b.width, b.height, b.values.size());
    for (auto v : b.values)
        if (v > 1)
            throw DomainError("binary mask value other than 0/1");
}

BinaryMask threshold(const ProbabilityMask& m, double t) {
    if (!(t > 0.0 && t < 1.0))
        throw DomainError("threshold must lie in (0, 1)");
    validate(m);
    BinaryMask out{m.tile, m.width, m.height, std::vector<std::uint8_t>(m.values.size())};
    std::transform(m.values.begin(), m.values.end(), out.values.begin(),
                   [t](float v) { return static_cast<std::uint8_t>(v >= t ? 1 : 0); });
    return out;
}

ComponentSet connected_components(const BinaryMask& b, int connectivity) {
    if (connectivity != 4 && connectivity != 8)
        throw DomainError("connectivity must be 4 or 8");
    validate(b);
    const int w = b.width;
    const int h = b.height;
    std::vector<std::int32_t> provisional(b.values.size(), 0);
    Equivalence eq;

    auto label = [&](int x, int y) -> std::int32_t {
        if (x < 0 || y < 0 || x >= w)
            return 0;
        return provisional[static_cast<std::size_t>(y) * w + x];
    };

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!b.at(x, y))
                continue;
            std::int32_t neighbours[4] = {label(x - 1, y), label(x, y - 1), 0, 0};
            if (connectivity == 8) {
                neighbours[2] = label(x - 1, y - 1);
                neighbours[3] = label(x + 1, y - 1);
            }
            std::int32_t chosen = 0;
            for (auto n : neighbours) {
                if (n == 0)
                    continue;
                if (chosen == 0)
                    chosen = n;
                else
                    eq.unite(chosen, n);
            }
            provisional[static_cast<std::size_t>(y) * w + x] = chosen != 0 ? chosen : eq.make();
        }
    }

    // Second pass: relabel roots densely in order of first appearance.
    std::vector<std::int32_t> dense(eq.parent.size(), 0);
    ComponentSet out{b.tile, w, h, connectivity, std::vector<std::int32_t>(b.values.size(), 0), {}};
    for (std::size_t i = 0; i < provisional.size(); ++i) {
        if (provisional[i] == 0)
            continue;
        const auto root = eq.find(provisional[i]);
        if (dense[root] == 0) {
            out.sizes.push_back(0);
            dense[root] = static_cast<std::int32_t>(out.sizes.size());
        }
        out.labels[i] = dense[root];
        ++out.sizes[dense[root] - 1];
    }
    return out;
}

BinaryMask despeckle(const ComponentSet& c, std::int64_t min_pixels) {
    if (min_pixels < 0)
        throw DomainError("min_pixels must be non-negative");
    BinaryMask out = BinaryMask::zeros(c.tile, c.width, c.height);
    for (std::size_t i = 0; i < c.labels.size(); ++i) {
        const auto id = c.labels[i];
        if (id != 0 && c.sizes[id - 1] >= min_pixels)
            out.values[i] = 1;
    }
    return out;
}

double iou(const BinaryMask& pred, const BinaryMask& truth) {
    if (pred.width != truth.width || pred.height != truth.height || pred.values.size() != truth.values.size())
        throw DomainError("IoU of masks with different dimensions");
    std::int64_t inter = 0;
    std::int64_t uni = 0;
    for (std::size_t i = 0; i < pred.values.size(); ++i) {
        const bool p = pred.values[i] != 0;
        const bool t = truth.values[i] != 0;
        inter += (p && t) ? 1 : 0;
        uni += (p || t) ? 1 : 0;
    }
    if (uni == 0)
        return 1.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double mean_iou(std::span<const MaskPair> pairs) {
    if (pairs.empty())
        throw DomainError("mean IoU of an empty list");
    double sum = 0.0;
    for (const auto& pair : pairs)
        sum += iou(pair.pred.get(), pair.truth.get());
    return sum / static_cast<double>(pairs.size());
}

} // namespace roofpedia::raster
