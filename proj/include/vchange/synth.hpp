#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "vchange/datamodel.hpp"
#include "vchange/raster.hpp"
#include "vchange/rng.hpp"

namespace vchange {

// Configuration for the synthetic time-lapse generator. Every field is part
// of the deterministic recipe: equal configs give bit-identical sequences.
struct SynthConfig {
    int width = 256;
    int height = 256;
    int n_frames = 10;
    int64_t frame_interval = 3600;  // seconds between frames
    double epsilon = 1.0;           // minimum depth difference for a change
    int tau = 5;                    // maximum temporal gap, in frames
    int n_events = 3;
    long long event_area_min = 100;  // rasterized polygon area bounds, pixels
    long long event_area_max = 600;
    double depth_drop_min = 10.0;  // must stay > epsilon
    double depth_drop_max = 30.0;
    double lighting_drift = 0.0;  // relative intensity drift amplitude
    double noise_sigma = 0.0;     // Gaussian pixel noise, normalized intensity
    uint64_t seed = 0;

    void check() const;
    static SynthConfig from_json(const nlohmann::json& j);
    nlohmann::ordered_json to_json() const;
};

// Per-pixel world depth for each temporal index.
struct DepthStack {
    std::vector<FloatRaster> frames;
};

// A volumetric change: depth inside the region drops by depth_drop between
// frames onset-1 and onset and keeps the new value afterwards.
struct SynthEvent {
    PolygonAnnotation region;
    int onset = 1;
    double depth_drop = 0.0;
};

struct SynthSequence {
    std::vector<RgbImage> images;
    DepthStack depth;
    std::vector<SynthEvent> events;
    Manifest manifest;  // one synthetic site; annotated pairs are consecutive frames
};

struct Lighting {
    double intensity = 0.9;
    std::array<double, 3> direction = {-0.4, -0.5, 0.75};
};

// (ambient + diffuse * max(0, n.L)) * intensity over the depth field's
// surface normals (central differences, clamped at edges).
FloatRaster lambert_shading(const FloatRaster& depth, const Lighting& lighting);

// Lambertian shading modulated by albedo plus seeded Gaussian noise, clamped
// to [0, 1] and quantized to 8 bits.
RgbImage render(const FloatRaster& depth, const RgbImage& albedo, const Lighting& lighting,
                double noise_sigma, Rng& rng);

struct DefinitionViolation {
    int event_index = -1;  // -1 for non-event pixels
    int x = 0, y = 0;
    std::string reason;
};

struct DefinitionCheck {
    bool ok = true;
    std::vector<DefinitionViolation> violations;
};

// Checks the volumetric-change condition: for every pixel of every event
// region, with i = onset-1 there exist temporal indices i < j < k with
// k - i < tau such that |z_j - z_i| > epsilon and |z_k - z_i| > epsilon; and
// no pixel outside every event region satisfies that condition for any i.
DefinitionCheck verify_definition(const DepthStack& depth, const std::vector<SynthEvent>& events,
                                  double epsilon, int tau);

SynthSequence generate(const SynthConfig& config);

}  // namespace vchange
