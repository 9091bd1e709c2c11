#include "vchange/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace vchange {

namespace {

double cross(double ox, double oy, double ax, double ay, double bx, double by) {
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox);
}

bool on_segment(double px, double py, double qx, double qy, double rx, double ry) {
    return std::min(px, rx) <= qx && qx <= std::max(px, rx) &&
           std::min(py, ry) <= qy && qy <= std::max(py, ry);
}

// Segment intersection including touching endpoints.
bool segments_intersect(const std::array<double, 2>& a, const std::array<double, 2>& b,
                        const std::array<double, 2>& c, const std::array<double, 2>& d) {
    const double d1 = cross(c[0], c[1], d[0], d[1], a[0], a[1]);
    const double d2 = cross(c[0], c[1], d[0], d[1], b[0], b[1]);
    const double d3 = cross(a[0], a[1], b[0], b[1], c[0], c[1]);
    const double d4 = cross(a[0], a[1], b[0], b[1], d[0], d[1]);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
        ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    if (d1 == 0 && on_segment(c[0], c[1], a[0], a[1], d[0], d[1])) return true;
    if (d2 == 0 && on_segment(c[0], c[1], b[0], b[1], d[0], d[1])) return true;
    if (d3 == 0 && on_segment(a[0], a[1], c[0], c[1], b[0], b[1])) return true;
    if (d4 == 0 && on_segment(a[0], a[1], d[0], d[1], b[0], b[1])) return true;
    return false;
}

}  // namespace

Box2d polygon_bbox(const PolygonAnnotation& poly) {
    Box2d box;
    if (poly.vertices.empty()) return box;
    box.min_x = box.max_x = poly.vertices[0][0];
    box.min_y = box.max_y = poly.vertices[0][1];
    for (const auto& v : poly.vertices) {
        box.min_x = std::min(box.min_x, v[0]);
        box.max_x = std::max(box.max_x, v[0]);
        box.min_y = std::min(box.min_y, v[1]);
        box.max_y = std::max(box.max_y, v[1]);
    }
    return box;
}

bool polygon_is_simple(const PolygonAnnotation& poly) {
    const auto& v = poly.vertices;
    const size_t n = v.size();
    if (n < 3) return false;
    for (size_t i = 0; i < n; ++i) {
        const auto& a = v[i];
        const auto& b = v[(i + 1) % n];
        if (a[0] == b[0] && a[1] == b[1]) return false;  // zero-length edge
        for (size_t j = i + 1; j < n; ++j) {
            // Skip edges adjacent to edge i (they legitimately share a vertex).
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
            if (segments_intersect(a, b, v[j], v[(j + 1) % n])) return false;
        }
    }
    return true;
}

PolygonAnnotation translate(const PolygonAnnotation& poly, double dx, double dy) {
    PolygonAnnotation out = poly;
    for (auto& v : out.vertices) {
        v[0] += dx;
        v[1] += dy;
    }
    return out;
}

}  // namespace vchange
