#include "vchange/baseline.hpp"

#include <cmath>

#include "vchange/errors.hpp"
#include "vchange/tiling.hpp"

namespace vchange {

void DetectorConfig::check() const {
    if (block < 2) throw UsageError("DetectorConfig: block must be >= 2");
    if (stride < 1 || stride > block) throw UsageError("DetectorConfig: need 1 <= stride <= block");
    if (min_area < 0) throw UsageError("DetectorConfig: min_area must be >= 0");
    if (patch < 1 || overlap < 0 || overlap >= patch)
        throw UsageError("DetectorConfig: need patch >= 1 and 0 <= overlap < patch");
}

FloatRaster to_grayscale_standardized(const RgbImage& image) {
    FloatRaster out(image.width, image.height);
    const size_t n = out.values.size();
    double sum = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const uint8_t* px = image.rgb.data() + 3 * i;
        const double luma = (0.2126 * px[0] + 0.7152 * px[1] + 0.0722 * px[2]) / 255.0;
        out.values[i] = static_cast<float>(luma);
        sum += luma;
    }
    const double mean = sum / static_cast<double>(n);
    double var = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double d = out.values[i] - mean;
        var += d * d;
    }
    var /= static_cast<double>(n);
    if (var <= 0.0) {
        for (auto& v : out.values) v = 0.0f;  // constant image
        return out;
    }
    const double inv_sigma = 1.0 / std::sqrt(var);
    for (auto& v : out.values) v = static_cast<float>((v - mean) * inv_sigma);
    return out;
}

FloatRaster norm_diff_score(const FloatRaster& a, const FloatRaster& b) {
    return abs_difference(a, b);
}

namespace {

std::vector<int> window_positions(int size, int block, int stride) {
    std::vector<int> xs;
    if (size <= block) {
        xs.push_back(0);
        return xs;
    }
    int x = 0;
    while (true) {
        if (x + block >= size) {
            if (xs.empty() || xs.back() != size - block) xs.push_back(size - block);
            break;
        }
        xs.push_back(x);
        x += stride;
    }
    return xs;
}

double window_score(const FloatRaster& a, const FloatRaster& b, int x0, int y0, int bw, int bh) {
    const int n = bw * bh;
    double sa = 0.0, sb = 0.0;
    for (int y = 0; y < bh; ++y) {
        for (int x = 0; x < bw; ++x) {
            sa += a.at(x0 + x, y0 + y);
            sb += b.at(x0 + x, y0 + y);
        }
    }
    const double ma = sa / n;
    const double mb = sb / n;
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (int y = 0; y < bh; ++y) {
        for (int x = 0; x < bw; ++x) {
            const double da = a.at(x0 + x, y0 + y) - ma;
            const double db = b.at(x0 + x, y0 + y) - mb;
            cov += da * db;
            va += da * da;
            vb += db * db;
        }
    }
    if (va <= 0.0 || vb <= 0.0) return 0.0;  // texture-less window: uninformative, not change
    double rho = cov / std::sqrt(va * vb);
    rho = std::clamp(rho, -1.0, 1.0);
    return (1.0 - rho) / 2.0;
}

}  // namespace

FloatRaster ncc_score_coarse(const FloatRaster& a, const FloatRaster& b, int block, int stride) {
    if (a.width != b.width || a.height != b.height)
        throw ValidationError("ncc_score: dimension mismatch");
    if (block > a.width || block > a.height)
        throw UsageError("ncc_score: block exceeds image dimensions");
    if (stride < 1 || stride > block) throw UsageError("ncc_score: need 1 <= stride <= block");

    const auto xs = window_positions(a.width, block, stride);
    const auto ys = window_positions(a.height, block, stride);
    FloatRaster coarse(static_cast<int>(xs.size()), static_cast<int>(ys.size()));
    const int bw = std::min(block, a.width);
    const int bh = std::min(block, a.height);
    for (size_t iy = 0; iy < ys.size(); ++iy)
        for (size_t ix = 0; ix < xs.size(); ++ix)
            coarse.at(static_cast<int>(ix), static_cast<int>(iy)) =
                static_cast<float>(window_score(a, b, xs[ix], ys[iy], bw, bh));
    return coarse;
}

FloatRaster ncc_score(const FloatRaster& a, const FloatRaster& b, int block, int stride) {
    return upsample_bilinear(ncc_score_coarse(a, b, block, stride), a.width, a.height);
}

FloatRaster detect_score(const RgbImage& image_a, const RgbImage& image_b,
                         const DetectorConfig& config) {
    config.check();
    if (image_a.width != image_b.width || image_a.height != image_b.height)
        throw ValidationError("detect: image dimension mismatch");

    // Standardization is global so that patch-wise and full-image runs see
    // the same statistics.
    const FloatRaster sa = to_grayscale_standardized(image_a);
    const FloatRaster sb = to_grayscale_standardized(image_b);

    if (config.method == DetectorConfig::Method::ncc)
        return ncc_score(sa, sb, config.block, config.stride);

    const bool patchwise = sa.width > config.patch || sa.height > config.patch;
    if (!patchwise) return norm_diff_score(sa, sb);

    const PatchGrid grid = plan_grid(sa.width, sa.height, config.patch, config.overlap);
    std::vector<FloatRaster> pieces;
    pieces.reserve(grid.rects.size());
    for (const PatchRect& rect : grid.rects)
        pieces.push_back(norm_diff_score(extract_patch(sa, rect), extract_patch(sb, rect)));
    return stitch_float(grid, pieces);
}

BinaryMask detect(const RgbImage& image_a, const RgbImage& image_b, const DetectorConfig& config) {
    const FloatRaster score = detect_score(image_a, image_b, config);
    return min_area_filter(threshold(score, config.rule), config.min_area);
}

}  // namespace vchange
