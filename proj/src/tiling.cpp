#include "vchange/tiling.hpp"

#include <algorithm>

#include "vchange/errors.hpp"

namespace vchange {

namespace {

std::vector<int> axis_positions(int size, int patch, int stride) {
    std::vector<int> xs;
    if (size <= patch) {
        xs.push_back(0);
        return xs;
    }
    int x = 0;
    while (true) {
        if (x + patch >= size) {
            xs.push_back(size - patch);
            break;
        }
        xs.push_back(x);
        x += stride;
    }
    // The clamped final position can coincide with the previous one when the
    // image size is an exact multiple of the stride.
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return xs;
}

void check_patches_match(const PatchGrid& grid, size_t n_patches, int pw, int ph, size_t index) {
    const PatchRect& r = grid.rects[index];
    if (pw != r.width() || ph != r.height())
        throw ValidationError("stitch: patch " + std::to_string(index) +
                              " dimensions do not match its rect");
    (void)n_patches;
}

}  // namespace

PatchGrid plan_grid(int image_w, int image_h, int patch, int overlap) {
    if (image_w < 1 || image_h < 1) throw ValidationError("plan_grid: image dims must be >= 1");
    if (patch < 1) throw UsageError("plan_grid: patch must be >= 1");
    if (overlap < 0 || overlap >= patch) throw UsageError("plan_grid: need 0 <= overlap < patch");

    PatchGrid grid;
    grid.image_w = image_w;
    grid.image_h = image_h;
    grid.patch = patch;
    grid.overlap = overlap;

    const int stride = patch - overlap;
    const auto xs = axis_positions(image_w, patch, stride);
    const auto ys = axis_positions(image_h, patch, stride);
    grid.rects.reserve(xs.size() * ys.size());
    for (int y0 : ys)
        for (int x0 : xs)
            grid.rects.push_back(PatchRect{x0, y0, std::min(x0 + patch, image_w),
                                           std::min(y0 + patch, image_h)});
    return grid;
}

FloatRaster extract_patch(const FloatRaster& raster, const PatchRect& rect) {
    FloatRaster out(rect.width(), rect.height());
    for (int y = 0; y < rect.height(); ++y)
        for (int x = 0; x < rect.width(); ++x)
            out.at(x, y) = raster.at(rect.x0 + x, rect.y0 + y);
    return out;
}

BinaryMask extract_patch(const BinaryMask& mask, const PatchRect& rect) {
    BinaryMask out(rect.width(), rect.height());
    for (int y = 0; y < rect.height(); ++y)
        for (int x = 0; x < rect.width(); ++x)
            out.set(x, y, mask.get(rect.x0 + x, rect.y0 + y));
    return out;
}

std::vector<FloatRaster> extract_patches(const FloatRaster& raster, const PatchGrid& grid) {
    std::vector<FloatRaster> out;
    out.reserve(grid.rects.size());
    for (const auto& r : grid.rects) out.push_back(extract_patch(raster, r));
    return out;
}

std::vector<BinaryMask> extract_patches(const BinaryMask& mask, const PatchGrid& grid) {
    std::vector<BinaryMask> out;
    out.reserve(grid.rects.size());
    for (const auto& r : grid.rects) out.push_back(extract_patch(mask, r));
    return out;
}

FloatRaster stitch_float(const PatchGrid& grid, const std::vector<FloatRaster>& patches) {
    if (patches.size() != grid.rects.size())
        throw ValidationError("stitch_float: patch count does not match rect count");
    std::vector<double> sum(static_cast<size_t>(grid.image_w) * grid.image_h, 0.0);
    std::vector<uint32_t> hits(sum.size(), 0);
    for (size_t i = 0; i < patches.size(); ++i) {
        check_patches_match(grid, patches.size(), patches[i].width, patches[i].height, i);
        const PatchRect& r = grid.rects[i];
        for (int y = 0; y < r.height(); ++y) {
            const size_t row = static_cast<size_t>(r.y0 + y) * grid.image_w + r.x0;
            for (int x = 0; x < r.width(); ++x) {
                sum[row + x] += patches[i].at(x, y);
                ++hits[row + x];
            }
        }
    }
    FloatRaster out(grid.image_w, grid.image_h);
    for (size_t i = 0; i < sum.size(); ++i) {
        if (hits[i] == 0)
            throw InternalError("stitch_float: grid does not cover every pixel");
        out.values[i] = static_cast<float>(sum[i] / hits[i]);
    }
    return out;
}

BinaryMask stitch_binary(const PatchGrid& grid, const std::vector<BinaryMask>& patches) {
    if (patches.size() != grid.rects.size())
        throw ValidationError("stitch_binary: patch count does not match rect count");
    BinaryMask out(grid.image_w, grid.image_h);
    for (size_t i = 0; i < patches.size(); ++i) {
        check_patches_match(grid, patches.size(), patches[i].width, patches[i].height, i);
        const PatchRect& r = grid.rects[i];
        for (int y = 0; y < r.height(); ++y)
            for (int x = 0; x < r.width(); ++x)
                if (patches[i].get(x, y)) out.set(r.x0 + x, r.y0 + y, true);
    }
    return out;
}

}  // namespace vchange
