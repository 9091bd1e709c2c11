#pragma once

#include <cstdint>
#include <vector>

#include "vchange/geometry.hpp"

namespace vchange {

// Dense binary change map, row-major, one byte per pixel holding 0 or 1.
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> bits;

    BinaryMask() = default;
    BinaryMask(int w, int h);

    bool get(int x, int y) const { return bits[static_cast<size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) { bits[static_cast<size_t>(y) * width + x] = v ? 1 : 0; }
    size_t size() const { return bits.size(); }

    long long count() const;

    bool operator==(const BinaryMask& other) const = default;
};

// Dense 2D float score field, row-major IEEE-754 single precision.
// NaN values are rejected at construction and at decode.
struct FloatRaster {
    int width = 0;
    int height = 0;
    std::vector<float> values;

    FloatRaster() = default;
    FloatRaster(int w, int h, float fill = 0.0f);
    static FloatRaster from_values(int w, int h, std::vector<float> vals);

    float at(int x, int y) const { return values[static_cast<size_t>(y) * width + x]; }
    float& at(int x, int y) { return values[static_cast<size_t>(y) * width + x]; }
    size_t size() const { return values.size(); }

    float min_value() const;
    float max_value() const;

    // Bit-pattern equality (no NaNs can be present, so this is float equality
    // that also distinguishes -0.0 from +0.0).
    bool bit_equal(const FloatRaster& other) const;
    bool operator==(const FloatRaster& other) const { return bit_equal(other); }
};

// Interleaved 8-bit RGB image, row-major.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> rgb;  // 3 * width * height bytes

    RgbImage() = default;
    RgbImage(int w, int h);

    const uint8_t* pixel(int x, int y) const {
        return rgb.data() + 3 * (static_cast<size_t>(y) * width + x);
    }
    uint8_t* pixel(int x, int y) {
        return rgb.data() + 3 * (static_cast<size_t>(y) * width + x);
    }

    bool operator==(const RgbImage& other) const = default;
};

// One 8-connected region of a binary mask. The bounding box is half-open:
// pixels satisfy x0 <= x < x1, y0 <= y < y1.
struct Component {
    int32_t label = 0;
    long long pixel_count = 0;
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
};

// Label map plus per-component statistics. Label 0 is background; components
// are numbered 1..n in ascending (y0, x0) order of their bounding boxes.
struct ComponentLabeling {
    int width = 0;
    int height = 0;
    std::vector<int32_t> labels;
    std::vector<Component> components;

    int32_t label_at(int x, int y) const { return labels[static_cast<size_t>(y) * width + x]; }
};

// Pixel (x, y) is set iff its center (x+0.5, y+0.5) lies inside the polygon
// under the even-odd rule; pixels outside the raster are clipped. A
// degenerate polygon (fewer than 3 vertices or zero rasterized area) yields
// an empty mask.
BinaryMask rasterize_polygon(const PolygonAnnotation& poly, int width, int height);

// Even-odd point-in-polygon test at an arbitrary point, using the same
// crossing convention as rasterize_polygon.
bool point_in_polygon(const PolygonAnnotation& poly, double px, double py);

ComponentLabeling connected_components(const BinaryMask& mask);

// Mask of a single labeled component.
BinaryMask component_mask(const ComponentLabeling& labeling, int32_t label);

// Corner-aligned bilinear resampling: input corners map onto output corners,
// so resampling to the same size is the identity.
FloatRaster upsample_bilinear(const FloatRaster& in, int out_w, int out_h);

}  // namespace vchange
