#pragma once

#include <array>
#include <vector>

namespace vchange {

// A ground-truth change event: a simple polygon in pixel coordinates,
// implicitly closed (last vertex connects back to the first).
struct PolygonAnnotation {
    std::vector<std::array<double, 2>> vertices;
};

struct Box2d {
    double min_x = 0.0, min_y = 0.0, max_x = 0.0, max_y = 0.0;
};

Box2d polygon_bbox(const PolygonAnnotation& poly);

// True when no two non-adjacent edges intersect or touch and no edge has
// zero length. O(n^2), fine for annotation-sized polygons.
bool polygon_is_simple(const PolygonAnnotation& poly);

PolygonAnnotation translate(const PolygonAnnotation& poly, double dx, double dy);

}  // namespace vchange
