#pragma once

#include <string>
#include <variant>

#include "vchange/raster.hpp"

namespace vchange {

// Binarization rule for score rasters. MeanPlusKSigma computes the mean and
// population standard deviation over all pixels of the raster it is applied
// to; a pixel is set iff its value strictly exceeds mean + k*sigma.
struct ThresholdRule {
    enum class Kind { fixed, mean_plus_k_sigma };
    Kind kind = Kind::mean_plus_k_sigma;
    double value = 2.0;  // t for fixed, k for mean_plus_k_sigma

    static ThresholdRule fixed(double t);
    static ThresholdRule mean_plus_k_sigma(double k);

    // "fixed:<t>" or "sigma:<k>".
    static ThresholdRule parse(const std::string& text);
    std::string to_string() const;
};

// 1 - confidence, elementwise. Inputs outside [0, 1] are clamped with a
// warning; external model files are untrusted.
FloatRaster complement_confidence(const FloatRaster& confidence);

FloatRaster abs_difference(const FloatRaster& a, const FloatRaster& b);

BinaryMask threshold(const FloatRaster& score, const ThresholdRule& rule);

// Removes every 8-connected component smaller than min_area pixels.
BinaryMask min_area_filter(const BinaryMask& mask, long long min_area);

// Score-field inputs a change map can be derived from.
struct ConfidenceInput {
    FloatRaster confidence;  // matcher coarse-match confidence in [0, 1]
};
struct DepthPairInput {
    FloatRaster depth_a;
    FloatRaster depth_b;
};
struct ActivationInput {
    FloatRaster activation;  // classifier pre-softmax activation
};
using ChangeMapInput = std::variant<ConfidenceInput, DepthPairInput, ActivationInput>;

// Variant-specific score (complement / absolute difference / identity),
// bilinear upsample to target dims, threshold, then min-area filter.
BinaryMask derive_change_map(const ChangeMapInput& input, const ThresholdRule& rule,
                             long long min_area, int target_w, int target_h);

}  // namespace vchange
