#include "vchange/changemap.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>

#include "vchange/errors.hpp"

namespace vchange {

ThresholdRule ThresholdRule::fixed(double t) {
    if (!std::isfinite(t)) throw UsageError("ThresholdRule: fixed threshold must be finite");
    return ThresholdRule{Kind::fixed, t};
}

ThresholdRule ThresholdRule::mean_plus_k_sigma(double k) {
    if (!(k >= 0.0)) throw UsageError("ThresholdRule: k must be >= 0");
    return ThresholdRule{Kind::mean_plus_k_sigma, k};
}

ThresholdRule ThresholdRule::parse(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw UsageError("ThresholdRule: expected fixed:<t> or sigma:<k>, got '" + text + "'");
    const std::string head = text.substr(0, colon);
    const std::string num = text.substr(colon + 1);
    double v = 0.0;
    try {
        size_t consumed = 0;
        v = std::stod(num, &consumed);
        if (consumed != num.size()) throw std::invalid_argument(num);
    } catch (const std::exception&) {
        throw UsageError("ThresholdRule: bad numeric value '" + num + "'");
    }
    if (head == "fixed") return fixed(v);
    if (head == "sigma") return mean_plus_k_sigma(v);
    throw UsageError("ThresholdRule: unknown rule kind '" + head + "'");
}

std::string ThresholdRule::to_string() const {
    const std::string head = kind == Kind::fixed ? "fixed:" : "sigma:";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", value);
    return head + buf;
}

FloatRaster complement_confidence(const FloatRaster& confidence) {
    FloatRaster out(confidence.width, confidence.height);
    bool clamped = false;
    for (size_t i = 0; i < confidence.values.size(); ++i) {
        float v = confidence.values[i];
        if (v < 0.0f || v > 1.0f) {
            clamped = true;
            v = std::clamp(v, 0.0f, 1.0f);
        }
        out.values[i] = 1.0f - v;
    }
    if (clamped) warn("complement_confidence: values outside [0,1] clamped");
    return out;
}

FloatRaster abs_difference(const FloatRaster& a, const FloatRaster& b) {
    if (a.width != b.width || a.height != b.height)
        throw ValidationError("abs_difference: dimension mismatch");
    FloatRaster out(a.width, a.height);
    for (size_t i = 0; i < a.values.size(); ++i)
        out.values[i] = std::fabs(a.values[i] - b.values[i]);
    return out;
}

BinaryMask threshold(const FloatRaster& score, const ThresholdRule& rule) {
    double cut = 0.0;
    if (rule.kind == ThresholdRule::Kind::fixed) {
        cut = rule.value;
    } else {
        double sum = 0.0;
        for (float v : score.values) sum += v;
        const double mean = sum / static_cast<double>(score.values.size());
        double var = 0.0;
        for (float v : score.values) {
            const double d = v - mean;
            var += d * d;
        }
        var /= static_cast<double>(score.values.size());  // population variance
        cut = mean + rule.value * std::sqrt(var);
    }
    BinaryMask out(score.width, score.height);
    for (size_t i = 0; i < score.values.size(); ++i)
        out.bits[i] = static_cast<double>(score.values[i]) > cut ? 1 : 0;
    return out;
}

BinaryMask min_area_filter(const BinaryMask& mask, long long min_area) {
    if (min_area < 0) throw UsageError("min_area_filter: min_area must be >= 0");
    if (min_area <= 1) return mask;  // every component has at least one pixel
    const ComponentLabeling labeling = connected_components(mask);
    std::vector<uint8_t> keep(labeling.components.size() + 1, 0);
    for (const Component& c : labeling.components)
        if (c.pixel_count >= min_area) keep[c.label] = 1;
    BinaryMask out(mask.width, mask.height);
    for (size_t i = 0; i < out.bits.size(); ++i) {
        const int32_t l = labeling.labels[i];
        out.bits[i] = (l != 0 && keep[l]) ? 1 : 0;
    }
    return out;
}

BinaryMask derive_change_map(const ChangeMapInput& input, const ThresholdRule& rule,
                             long long min_area, int target_w, int target_h) {
    FloatRaster score;
    if (const auto* conf = std::get_if<ConfidenceInput>(&input)) {
        score = complement_confidence(conf->confidence);
    } else if (const auto* pair = std::get_if<DepthPairInput>(&input)) {
        score = abs_difference(pair->depth_a, pair->depth_b);
    } else {
        score = std::get<ActivationInput>(input).activation;
    }
    const FloatRaster full = upsample_bilinear(score, target_w, target_h);
    return min_area_filter(threshold(full, rule), min_area);
}

}  // namespace vchange
