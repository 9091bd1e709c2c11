#include "vchange/raster.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>

#include "vchange/errors.hpp"

namespace vchange {

BinaryMask::BinaryMask(int w, int h) {
    if (w < 1 || h < 1) throw ValidationError("BinaryMask: width and height must be >= 1");
    width = w;
    height = h;
    bits.assign(static_cast<size_t>(w) * h, 0);
}

long long BinaryMask::count() const {
    long long n = 0;
    for (uint8_t b : bits) n += b != 0;
    return n;
}

FloatRaster::FloatRaster(int w, int h, float fill) {
    if (w < 1 || h < 1) throw ValidationError("FloatRaster: width and height must be >= 1");
    if (std::isnan(fill)) throw ValidationError("FloatRaster: NaN rejected");
    width = w;
    height = h;
    values.assign(static_cast<size_t>(w) * h, fill);
}

FloatRaster FloatRaster::from_values(int w, int h, std::vector<float> vals) {
    if (w < 1 || h < 1) throw ValidationError("FloatRaster: width and height must be >= 1");
    if (vals.size() != static_cast<size_t>(w) * h)
        throw ValidationError("FloatRaster: value count does not match dimensions");
    for (float v : vals)
        if (std::isnan(v)) throw ValidationError("FloatRaster: NaN rejected");
    FloatRaster r;
    r.width = w;
    r.height = h;
    r.values = std::move(vals);
    return r;
}

float FloatRaster::min_value() const {
    return *std::min_element(values.begin(), values.end());
}

float FloatRaster::max_value() const {
    return *std::max_element(values.begin(), values.end());
}

bool FloatRaster::bit_equal(const FloatRaster& other) const {
    if (width != other.width || height != other.height) return false;
    return std::memcmp(values.data(), other.values.data(), values.size() * sizeof(float)) == 0;
}

RgbImage::RgbImage(int w, int h) {
    if (w < 1 || h < 1) throw ValidationError("RgbImage: width and height must be >= 1");
    width = w;
    height = h;
    rgb.assign(static_cast<size_t>(w) * h * 3, 0);
}

bool point_in_polygon(const PolygonAnnotation& poly, double px, double py) {
    const auto& v = poly.vertices;
    const size_t n = v.size();
    bool inside = false;
    for (size_t i = 0; i < n; ++i) {
        const double x1 = v[i][0], y1 = v[i][1];
        const double x2 = v[(i + 1) % n][0], y2 = v[(i + 1) % n][1];
        if ((y1 > py) != (y2 > py)) {
            const double x_cross = (x2 - x1) * (py - y1) / (y2 - y1) + x1;
            if (px < x_cross) inside = !inside;
        }
    }
    return inside;
}

BinaryMask rasterize_polygon(const PolygonAnnotation& poly, int width, int height) {
    BinaryMask out(width, height);
    const auto& v = poly.vertices;
    const size_t n = v.size();
    if (n < 3) {
        warn("rasterize_polygon: degenerate polygon (fewer than 3 vertices)");
        return out;
    }

    const Box2d box = polygon_bbox(poly);
    int y_begin = static_cast<int>(std::floor(box.min_y - 0.5));
    int y_end = static_cast<int>(std::ceil(box.max_y));
    y_begin = std::max(y_begin, 0);
    y_end = std::min(y_end, height - 1);

    std::vector<double> crossings;
    bool any = false;
    for (int y = y_begin; y <= y_end; ++y) {
        const double py = y + 0.5;
        crossings.clear();
        for (size_t i = 0; i < n; ++i) {
            const double x1 = v[i][0], y1 = v[i][1];
            const double x2 = v[(i + 1) % n][0], y2 = v[(i + 1) % n][1];
            if ((y1 > py) != (y2 > py))
                crossings.push_back((x2 - x1) * (py - y1) / (y2 - y1) + x1);
        }
        std::sort(crossings.begin(), crossings.end());
        for (size_t k = 0; k + 1 < crossings.size(); k += 2) {
            // Pixel centers px = x + 0.5 with crossings[k] <= px < crossings[k+1]
            // see an odd number of boundary crossings to their right.
            long long xs = static_cast<long long>(std::ceil(crossings[k] - 0.5));
            long long xe = static_cast<long long>(std::ceil(crossings[k + 1] - 0.5)) - 1;
            xs = std::max<long long>(xs, 0);
            xe = std::min<long long>(xe, width - 1);
            for (long long x = xs; x <= xe; ++x) {
                out.set(static_cast<int>(x), y, true);
                any = true;
            }
        }
    }
    if (!any) warn("rasterize_polygon: polygon has zero rasterized area");
    return out;
}

namespace {

int32_t uf_find(std::vector<int32_t>& parent, int32_t x) {
    int32_t root = x;
    while (parent[root] != root) root = parent[root];
    while (parent[x] != root) {
        int32_t next = parent[x];
        parent[x] = root;
        x = next;
    }
    return root;
}

void uf_union(std::vector<int32_t>& parent, int32_t a, int32_t b) {
    a = uf_find(parent, a);
    b = uf_find(parent, b);
    if (a == b) return;
    if (a < b)
        parent[b] = a;
    else
        parent[a] = b;
}

}  // namespace

ComponentLabeling connected_components(const BinaryMask& mask) {
    ComponentLabeling result;
    result.width = mask.width;
    result.height = mask.height;
    result.labels.assign(mask.bits.size(), 0);

    const int w = mask.width;
    const int h = mask.height;
    std::vector<int32_t> parent;
    parent.push_back(0);  // label 0 = background, never merged

    // First pass: provisional labels, merging with the four already-visited
    // 8-neighbors (W, NW, N, NE).
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const size_t idx = static_cast<size_t>(y) * w + x;
            if (!mask.bits[idx]) continue;
            int32_t best = 0;
            auto consider = [&](int nx, int ny) {
                if (nx < 0 || nx >= w || ny < 0) return;
                const int32_t l = result.labels[static_cast<size_t>(ny) * w + nx];
                if (l == 0) return;
                if (best == 0)
                    best = l;
                else
                    uf_union(parent, best, l);
            };
            consider(x - 1, y);
            consider(x - 1, y - 1);
            consider(x, y - 1);
            consider(x + 1, y - 1);
            if (best == 0) {
                best = static_cast<int32_t>(parent.size());
                parent.push_back(best);
            }
            result.labels[idx] = best;
        }
    }

    // Resolve provisional labels to roots.
    std::vector<int32_t> root_of(parent.size());
    for (size_t i = 1; i < parent.size(); ++i)
        root_of[i] = uf_find(parent, static_cast<int32_t>(i));

    // Gather per-root statistics.
    struct Stats {
        long long count = 0;
        int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
        size_t first_pixel = 0;
        bool seen = false;
    };
    std::vector<Stats> stats(parent.size());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const size_t idx = static_cast<size_t>(y) * w + x;
            int32_t l = result.labels[idx];
            if (l == 0) continue;
            l = root_of[l];
            Stats& s = stats[l];
            if (!s.seen) {
                s.seen = true;
                s.x0 = x;
                s.y0 = y;
                s.x1 = x + 1;
                s.y1 = y + 1;
                s.first_pixel = idx;
            } else {
                s.x0 = std::min(s.x0, x);
                s.y0 = std::min(s.y0, y);
                s.x1 = std::max(s.x1, x + 1);
                s.y1 = std::max(s.y1, y + 1);
            }
            ++s.count;
        }
    }

    // Order components by (y0, x0), tie-broken by first pixel in raster order.
    std::vector<int32_t> roots;
    for (size_t i = 1; i < parent.size(); ++i)
        if (stats[i].seen && root_of[i] == static_cast<int32_t>(i)) roots.push_back(static_cast<int32_t>(i));
    std::sort(roots.begin(), roots.end(), [&](int32_t a, int32_t b) {
        const Stats& sa = stats[a];
        const Stats& sb = stats[b];
        if (sa.y0 != sb.y0) return sa.y0 < sb.y0;
        if (sa.x0 != sb.x0) return sa.x0 < sb.x0;
        return sa.first_pixel < sb.first_pixel;
    });

    std::vector<int32_t> final_label(parent.size(), 0);
    result.components.reserve(roots.size());
    for (size_t k = 0; k < roots.size(); ++k) {
        final_label[roots[k]] = static_cast<int32_t>(k + 1);
        const Stats& s = stats[roots[k]];
        Component c;
        c.label = static_cast<int32_t>(k + 1);
        c.pixel_count = s.count;
        c.x0 = s.x0;
        c.y0 = s.y0;
        c.x1 = s.x1;
        c.y1 = s.y1;
        result.components.push_back(c);
    }

    for (auto& l : result.labels)
        if (l != 0) l = final_label[root_of[l]];

    return result;
}

BinaryMask component_mask(const ComponentLabeling& labeling, int32_t label) {
    BinaryMask out(labeling.width, labeling.height);
    for (size_t i = 0; i < labeling.labels.size(); ++i)
        if (labeling.labels[i] == label) out.bits[i] = 1;
    return out;
}

FloatRaster upsample_bilinear(const FloatRaster& in, int out_w, int out_h) {
    if (out_w < 1 || out_h < 1) throw ValidationError("upsample_bilinear: output dims must be >= 1");
    FloatRaster out(out_w, out_h);
    const int in_w = in.width;
    const int in_h = in.height;
    const double sx = out_w > 1 ? static_cast<double>(in_w - 1) / (out_w - 1) : 0.0;
    const double sy = out_h > 1 ? static_cast<double>(in_h - 1) / (out_h - 1) : 0.0;
    for (int y = 0; y < out_h; ++y) {
        const double fy = y * sy;
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, in_h - 1);
        const double wy = fy - y0;
        for (int x = 0; x < out_w; ++x) {
            const double fx = x * sx;
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, in_w - 1);
            const double wx = fx - x0;
            const double a = in.at(x0, y0);
            const double b = in.at(x1, y0);
            const double c = in.at(x0, y1);
            const double d = in.at(x1, y1);
            const double v = (1.0 - wx) * (1.0 - wy) * a + wx * (1.0 - wy) * b +
                             (1.0 - wx) * wy * c + wx * wy * d;
            out.at(x, y) = static_cast<float>(v);
        }
    }
    return out;
}

}  // namespace vchange
