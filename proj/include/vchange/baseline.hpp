#pragma once

#include "vchange/changemap.hpp"
#include "vchange/raster.hpp"

namespace vchange {

// Classical, training-free detectors: illumination-normalized differencing
// and block zero-normalized cross-correlation.
struct DetectorConfig {
    enum class Method { norm_diff, ncc };
    Method method = Method::ncc;
    int block = 16;   // ncc window side
    int stride = 8;   // ncc window step, defaults to block/2
    ThresholdRule rule = ThresholdRule::mean_plus_k_sigma(2.0);
    long long min_area = 0;
    int patch = 1024;  // patch-wise processing kicks in above this size
    int overlap = 64;

    void check() const;
};

// Rec. 709 luma, then zero-mean / unit population-sigma over the image.
// Constant images map to all-zeros.
FloatRaster to_grayscale_standardized(const RgbImage& image);

// |a - b| on standardized inputs.
FloatRaster norm_diff_score(const FloatRaster& a, const FloatRaster& b);

// Coarse grid of (1 - rho) / 2 where rho is the windowed ZNCC between
// co-located blocks; windows with zero variance in either image score 0.
// One value per window position (stride-stepped, last clamped inside).
FloatRaster ncc_score_coarse(const FloatRaster& a, const FloatRaster& b, int block, int stride);

// ncc_score_coarse bilinearly upsampled to the input resolution.
FloatRaster ncc_score(const FloatRaster& a, const FloatRaster& b, int block, int stride);

// Full pipeline: standardize both images, score with the configured method
// (patch-wise when the image exceeds config.patch), threshold on the full
// stitched score raster, then min-area filter.
BinaryMask detect(const RgbImage& image_a, const RgbImage& image_b, const DetectorConfig& config);

// The score raster detect() thresholds; exposed so callers can check the
// full-image / patch-wise equivalence.
FloatRaster detect_score(const RgbImage& image_a, const RgbImage& image_b,
                         const DetectorConfig& config);

}  // namespace vchange
