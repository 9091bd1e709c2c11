#pragma once

#include <vector>

#include "vchange/raster.hpp"

namespace vchange {

// Half-open patch rectangle: x0 <= x < x1, y0 <= y < y1.
struct PatchRect {
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
    int width() const { return x1 - x0; }
    int height() const { return y1 - y0; }
    bool operator==(const PatchRect&) const = default;
};

// Overlapping patch grid covering an image. Rects are laid out at multiples
// of stride = patch - overlap; the final row/column is shifted inward to the
// image edge so every pixel is covered without padding.
struct PatchGrid {
    int image_w = 0;
    int image_h = 0;
    int patch = 0;
    int overlap = 0;
    std::vector<PatchRect> rects;
};

PatchGrid plan_grid(int image_w, int image_h, int patch, int overlap);

FloatRaster extract_patch(const FloatRaster& raster, const PatchRect& rect);
BinaryMask extract_patch(const BinaryMask& mask, const PatchRect& rect);
std::vector<FloatRaster> extract_patches(const FloatRaster& raster, const PatchGrid& grid);
std::vector<BinaryMask> extract_patches(const BinaryMask& mask, const PatchGrid& grid);

// Each output pixel is the arithmetic mean of all patch values covering it.
FloatRaster stitch_float(const PatchGrid& grid, const std::vector<FloatRaster>& patches);

// Logical OR over covering patches.
BinaryMask stitch_binary(const PatchGrid& grid, const std::vector<BinaryMask>& patches);

}  // namespace vchange
