#include "vchange/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "vchange/errors.hpp"

namespace vchange {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr double kAmbient = 0.35;
constexpr double kDiffuse = 0.6;
constexpr int kEventSeparation = 32;  // minimum gap between event bounding boxes
constexpr int kPlacementRetries = 500;

}  // namespace

void SynthConfig::check() const {
    if (width < 32 || height < 32) throw UsageError("synth: width and height must be >= 32");
    if (n_frames < 3) throw UsageError("synth: n_frames must be >= 3");
    if (frame_interval <= 0) throw UsageError("synth: frame_interval must be > 0");
    // The change condition needs two distinct later frames j < k with
    // k - i < tau, so k - i >= 2 forces tau >= 3 for realizable events.
    if (tau < 3) throw UsageError("synth: tau must be >= 3 to admit a persistence witness");
    if (n_events < 0) throw UsageError("synth: n_events must be >= 0");
    if (event_area_min < 9 || event_area_max < event_area_min)
        throw UsageError("synth: bad event_area_range");
    if (!(epsilon > 0.0)) throw UsageError("synth: epsilon must be > 0");
    if (!(depth_drop_min > epsilon) || depth_drop_max < depth_drop_min)
        throw UsageError("synth: depth_drop_range must lie above epsilon");
    if (lighting_drift < 0.0 || lighting_drift > 0.1)
        throw UsageError("synth: lighting_drift must be in [0, 0.1]");
    if (noise_sigma < 0.0) throw UsageError("synth: noise_sigma must be >= 0");
}

SynthConfig SynthConfig::from_json(const json& j) {
    SynthConfig c;
    c.width = j.value("width", c.width);
    c.height = j.value("height", c.height);
    c.n_frames = j.value("n_frames", c.n_frames);
    c.frame_interval = j.value("frame_interval", c.frame_interval);
    c.epsilon = j.value("epsilon", c.epsilon);
    c.tau = j.value("tau", c.tau);
    c.n_events = j.value("n_events", c.n_events);
    if (j.contains("event_area_range")) {
        c.event_area_min = j["event_area_range"].at(0).get<long long>();
        c.event_area_max = j["event_area_range"].at(1).get<long long>();
    }
    if (j.contains("depth_drop_range")) {
        c.depth_drop_min = j["depth_drop_range"].at(0).get<double>();
        c.depth_drop_max = j["depth_drop_range"].at(1).get<double>();
    }
    c.lighting_drift = j.value("lighting_drift", c.lighting_drift);
    c.noise_sigma = j.value("noise_sigma", c.noise_sigma);
    c.seed = j.value("seed", c.seed);
    c.check();
    return c;
}

ordered_json SynthConfig::to_json() const {
    ordered_json j;
    j["width"] = width;
    j["height"] = height;
    j["n_frames"] = n_frames;
    j["frame_interval"] = frame_interval;
    j["epsilon"] = epsilon;
    j["tau"] = tau;
    j["n_events"] = n_events;
    j["event_area_range"] = {event_area_min, event_area_max};
    j["depth_drop_range"] = {depth_drop_min, depth_drop_max};
    j["lighting_drift"] = lighting_drift;
    j["noise_sigma"] = noise_sigma;
    j["seed"] = seed;
    return j;
}

FloatRaster lambert_shading(const FloatRaster& depth, const Lighting& lighting) {
    const int w = depth.width;
    const int h = depth.height;
    const double norm = std::sqrt(lighting.direction[0] * lighting.direction[0] +
                                  lighting.direction[1] * lighting.direction[1] +
                                  lighting.direction[2] * lighting.direction[2]);
    if (!(norm > 0.0)) throw UsageError("lambert_shading: zero light direction");
    const double lx = lighting.direction[0] / norm;
    const double ly = lighting.direction[1] / norm;
    const double lz = lighting.direction[2] / norm;

    FloatRaster out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            // Height field is the negated depth; central differences, clamped
            // at the raster edges.
            const int xm = std::max(x - 1, 0), xp = std::min(x + 1, w - 1);
            const int ym = std::max(y - 1, 0), yp = std::min(y + 1, h - 1);
            const double gx = (-depth.at(xp, y) + depth.at(xm, y)) / (xp - xm == 0 ? 1.0 : xp - xm);
            const double gy = (-depth.at(x, yp) + depth.at(x, ym)) / (yp - ym == 0 ? 1.0 : yp - ym);
            const double inv = 1.0 / std::sqrt(gx * gx + gy * gy + 1.0);
            const double ndotl = (-gx * lx - gy * ly + lz) * inv;
            const double lambert = std::max(0.0, ndotl);
            out.at(x, y) = static_cast<float>((kAmbient + kDiffuse * lambert) * lighting.intensity);
        }
    }
    return out;
}

RgbImage render(const FloatRaster& depth, const RgbImage& albedo, const Lighting& lighting,
                double noise_sigma, Rng& rng) {
    if (depth.width != albedo.width || depth.height != albedo.height)
        throw ValidationError("render: depth and albedo dimensions differ");
    const FloatRaster shade = lambert_shading(depth, lighting);
    RgbImage out(albedo.width, albedo.height);
    for (size_t i = 0; i < shade.values.size(); ++i) {
        const double s = shade.values[i];
        for (int c = 0; c < 3; ++c) {
            double v = albedo.rgb[3 * i + c] / 255.0 * s;
            if (noise_sigma > 0.0) v += rng.normal(0.0, noise_sigma);
            v = std::clamp(v, 0.0, 1.0);
            out.rgb[3 * i + c] = static_cast<uint8_t>(std::lround(v * 255.0));
        }
    }
    return out;
}

namespace {

// Smooth value noise: random lattice values, bilinearly interpolated.
std::vector<double> value_noise(int w, int h, int cell, Rng& rng) {
    const int gw = w / cell + 2;
    const int gh = h / cell + 2;
    std::vector<double> lattice(static_cast<size_t>(gw) * gh);
    for (auto& v : lattice) v = rng.next_double();
    std::vector<double> out(static_cast<size_t>(w) * h);
    for (int y = 0; y < h; ++y) {
        const double fy = static_cast<double>(y) / cell;
        const int y0 = static_cast<int>(fy);
        const double wy = fy - y0;
        for (int x = 0; x < w; ++x) {
            const double fx = static_cast<double>(x) / cell;
            const int x0 = static_cast<int>(fx);
            const double wx = fx - x0;
            const double a = lattice[static_cast<size_t>(y0) * gw + x0];
            const double b = lattice[static_cast<size_t>(y0) * gw + x0 + 1];
            const double c = lattice[static_cast<size_t>(y0 + 1) * gw + x0];
            const double d = lattice[static_cast<size_t>(y0 + 1) * gw + x0 + 1];
            out[static_cast<size_t>(y) * w + x] =
                (1 - wx) * (1 - wy) * a + wx * (1 - wy) * b + (1 - wx) * wy * c + wx * wy * d;
        }
    }
    return out;
}

// Albedo texture values avoid the band around 0.5 so that pasting the
// negated texture changes every pixel by at least 0.22; the negation also
// anticorrelates pasted regions against the originals.
double banded(double t) {
    return t < 0.5 ? 0.08 + 0.62 * t : 0.30 + 0.62 * t;  // [0.08,0.39] | [0.61,0.92]
}

double shoelace_area(const PolygonAnnotation& poly) {
    double a = 0.0;
    const size_t n = poly.vertices.size();
    for (size_t i = 0; i < n; ++i) {
        const auto& p = poly.vertices[i];
        const auto& q = poly.vertices[(i + 1) % n];
        a += p[0] * q[1] - q[0] * p[1];
    }
    return std::fabs(a) / 2.0;
}

// Star-shaped polygon around a center: strictly increasing angles with
// jittered radii, which is always simple.
PolygonAnnotation star_polygon(double cx, double cy, double radius, Rng& rng) {
    const int n = 5 + static_cast<int>(rng.bounded(8));  // 5..12 vertices
    PolygonAnnotation poly;
    poly.vertices.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double theta =
            2.0 * 3.14159265358979323846 * (i + 0.1 + 0.8 * rng.next_double()) / n;
        const double r = radius * (0.6 + 0.4 * rng.next_double());
        poly.vertices.push_back({cx + r * std::cos(theta), cy + r * std::sin(theta)});
    }
    return poly;
}

struct PlacedEvent {
    PolygonAnnotation region;
    BinaryMask mask;
    int ix0, iy0, ix1, iy1;  // integer bbox, dilated for separation checks
};

bool boxes_overlap(int ax0, int ay0, int ax1, int ay1, int bx0, int by0, int bx1, int by1) {
    return ax0 < bx1 && bx0 < ax1 && ay0 < by1 && by0 < ay1;
}

PlacedEvent place_event(const SynthConfig& cfg, const std::vector<PlacedEvent>& existing,
                        Rng& rng) {
    for (int attempt = 0; attempt < kPlacementRetries; ++attempt) {
        const double target_area =
            rng.uniform(static_cast<double>(cfg.event_area_min) * 1.15,
                        static_cast<double>(cfg.event_area_max) * 0.85);
        const double r0 = std::sqrt(target_area / 3.14159265358979323846) / 0.82;
        if (2.0 * (r0 + 2.0) >= cfg.width || 2.0 * (r0 + 2.0) >= cfg.height)
            throw ValidationError("synth: event_area_range too large for the image");
        const double cx = rng.uniform(r0 + 2.0, cfg.width - r0 - 2.0);
        const double cy = rng.uniform(r0 + 2.0, cfg.height - r0 - 2.0);
        PolygonAnnotation poly = star_polygon(cx, cy, r0, rng);

        // One analytic rescale toward the target, then accept on raster area.
        const double area = shoelace_area(poly);
        if (area <= 0.0) continue;
        const double s = std::sqrt(target_area / area);
        for (auto& v : poly.vertices) {
            v[0] = cx + (v[0] - cx) * s;
            v[1] = cy + (v[1] - cy) * s;
        }

        const Box2d box = polygon_bbox(poly);
        if (box.min_x < 1.0 || box.min_y < 1.0 || box.max_x > cfg.width - 1.0 ||
            box.max_y > cfg.height - 1.0)
            continue;

        PlacedEvent pe;
        pe.region = poly;
        pe.mask = rasterize_polygon(poly, cfg.width, cfg.height);
        const long long raster_area = pe.mask.count();
        if (raster_area < cfg.event_area_min || raster_area > cfg.event_area_max) continue;

        pe.ix0 = static_cast<int>(std::floor(box.min_x)) - kEventSeparation;
        pe.iy0 = static_cast<int>(std::floor(box.min_y)) - kEventSeparation;
        pe.ix1 = static_cast<int>(std::ceil(box.max_x)) + kEventSeparation;
        pe.iy1 = static_cast<int>(std::ceil(box.max_y)) + kEventSeparation;
        bool clash = false;
        for (const PlacedEvent& other : existing) {
            if (boxes_overlap(pe.ix0, pe.iy0, pe.ix1, pe.iy1, other.ix0, other.iy0, other.ix1,
                              other.iy1)) {
                clash = true;
                break;
            }
        }
        if (!clash) return pe;
    }
    throw ValidationError("synth: could not place events after bounded retries (config too crowded)");
}

}  // namespace

DefinitionCheck verify_definition(const DepthStack& depth, const std::vector<SynthEvent>& events,
                                  double epsilon, int tau) {
    DefinitionCheck check;
    const int n = static_cast<int>(depth.frames.size());
    if (n == 0) return check;
    const int w = depth.frames[0].width;
    const int h = depth.frames[0].height;
    for (const FloatRaster& f : depth.frames)
        if (f.width != w || f.height != h)
            throw ValidationError("verify_definition: depth frames differ in size");

    auto add = [&](int event_index, int x, int y, const std::string& reason) {
        check.ok = false;
        if (check.violations.size() < 10000)
            check.violations.push_back(DefinitionViolation{event_index, x, y, reason});
    };

    // Exists i < j < k with k - i < tau, |z_j - z_i| > eps and |z_k - z_i| > eps?
    auto condition_at = [&](size_t idx, int i) {
        const double zi = depth.frames[i].values[idx];
        for (int j = i + 1; j < n - 1; ++j) {
            if (!(std::fabs(depth.frames[j].values[idx] - zi) > epsilon)) continue;
            const int k_max = std::min(n - 1, i + tau - 1);
            for (int k = j + 1; k <= k_max; ++k)
                if (std::fabs(depth.frames[k].values[idx] - zi) > epsilon) return true;
        }
        return false;
    };

    BinaryMask event_union(w, h);
    std::vector<BinaryMask> masks;
    masks.reserve(events.size());
    for (const SynthEvent& e : events) {
        masks.push_back(rasterize_polygon(e.region, w, h));
        for (size_t i = 0; i < event_union.bits.size(); ++i)
            if (masks.back().bits[i]) event_union.bits[i] = 1;
    }

    for (size_t ei = 0; ei < events.size(); ++ei) {
        const SynthEvent& e = events[ei];
        if (e.onset < 1 || e.onset > n - 2) {
            add(static_cast<int>(ei), -1, -1, "onset leaves no room for persistence witnesses");
            continue;
        }
        const int i = e.onset - 1;
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const size_t idx = static_cast<size_t>(y) * w + x;
                if (!masks[ei].bits[idx]) continue;
                if (!condition_at(idx, i))
                    add(static_cast<int>(ei), x, y, "event pixel fails the change condition");
            }
        }
    }

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const size_t idx = static_cast<size_t>(y) * w + x;
            if (event_union.bits[idx]) continue;
            // Constant series can't satisfy the condition; cheap early skip.
            const float z0 = depth.frames[0].values[idx];
            bool constant = true;
            for (int t = 1; t < n && constant; ++t) constant = depth.frames[t].values[idx] == z0;
            if (constant) continue;
            bool satisfied = false;
            for (int i = 0; i < n - 2 && !satisfied; ++i) satisfied = condition_at(idx, i);
            if (satisfied) add(-1, x, y, "non-event pixel satisfies the change condition");
        }
    }
    return check;
}

SynthSequence generate(const SynthConfig& config) {
    config.check();
    Rng rng(config.seed);
    const int w = config.width;
    const int h = config.height;
    const size_t npix = static_cast<size_t>(w) * h;

    // Albedo texture: two octaves of value noise through the banded transfer,
    // with a gentle fixed tint per channel.
    const std::vector<double> coarse = value_noise(w, h, 16, rng);
    const std::vector<double> fine = value_noise(w, h, 4, rng);
    const double tint[3] = {0.88 + 0.12 * rng.next_double(), 0.88 + 0.12 * rng.next_double(),
                            0.88 + 0.12 * rng.next_double()};
    std::vector<double> texture(npix);
    RgbImage base_albedo(w, h);
    for (size_t i = 0; i < npix; ++i) {
        texture[i] = banded(std::clamp(0.65 * coarse[i] + 0.35 * fine[i], 0.0, 1.0));
        for (int c = 0; c < 3; ++c)
            base_albedo.rgb[3 * i + c] =
                static_cast<uint8_t>(std::lround(texture[i] * tint[c] * 255.0));
    }

    // Base terrain: a comfortably positive depth field with gentle relief so
    // shading stays smooth. Keeps depth > 0 after the largest possible drop.
    const std::vector<double> relief = value_noise(w, h, 64, rng);
    const double depth_floor = config.depth_drop_max + 20.0;
    FloatRaster base_depth(w, h);
    for (size_t i = 0; i < npix; ++i)
        base_depth.values[i] = static_cast<float>(depth_floor + 30.0 * relief[i]);

    // Events: disjoint star polygons with onsets that leave room for the
    // persistence witnesses (j = onset, k = onset + 1).
    std::vector<PlacedEvent> placed;
    std::vector<SynthEvent> events;
    for (int e = 0; e < config.n_events; ++e) {
        PlacedEvent pe = place_event(config, placed, rng);
        SynthEvent ev;
        ev.region = pe.region;
        ev.onset = 1 + static_cast<int>(rng.bounded(static_cast<uint64_t>(config.n_frames - 2)));
        ev.depth_drop = rng.uniform(config.depth_drop_min, config.depth_drop_max);
        events.push_back(std::move(ev));
        placed.push_back(std::move(pe));
    }

    SynthSequence seq;
    seq.events = events;

    // Depth stack: permanent drop inside each region from its onset onward.
    seq.depth.frames.reserve(config.n_frames);
    for (int t = 0; t < config.n_frames; ++t) {
        FloatRaster frame = base_depth;
        for (size_t ei = 0; ei < events.size(); ++ei) {
            if (t < events[ei].onset) continue;
            const float drop = static_cast<float>(events[ei].depth_drop);
            for (size_t i = 0; i < npix; ++i)
                if (placed[ei].mask.bits[i]) frame.values[i] -= drop;
        }
        seq.depth.frames.push_back(std::move(frame));
    }

    // Appearance: the event pastes the negated texture into the albedo from
    // its onset onward, so with zero noise and drift the photometric change
    // is confined exactly to the annotated region. Shading geometry is the
    // base terrain; the evolving depth is carried by the depth stack.
    seq.images.reserve(config.n_frames);
    for (int t = 0; t < config.n_frames; ++t) {
        RgbImage albedo = base_albedo;
        for (size_t ei = 0; ei < events.size(); ++ei) {
            if (t < events[ei].onset) continue;
            for (size_t i = 0; i < npix; ++i) {
                if (!placed[ei].mask.bits[i]) continue;
                for (int c = 0; c < 3; ++c)
                    albedo.rgb[3 * i + c] =
                        static_cast<uint8_t>(std::lround((1.0 - texture[i]) * tint[c] * 255.0));
            }
        }
        Lighting lighting;
        lighting.intensity =
            0.9 * (1.0 + config.lighting_drift *
                             std::sin(2.0 * 3.14159265358979323846 * t / config.n_frames));
        seq.images.push_back(render(base_depth, albedo, lighting, config.noise_sigma, rng));
    }

    // Manifest: one site; every consecutive frame pair is annotated, with the
    // polygons of the events occurring between them (possibly none).
    Site site;
    site.name = "synthetic";
    site.split = Split::test;
    site.width = w;
    site.height = h;
    for (int t = 0; t < config.n_frames; ++t) {
        Frame frame;
        frame.index = t;
        frame.timestamp = static_cast<int64_t>(t) * config.frame_interval;
        char buf[64];
        std::snprintf(buf, sizeof(buf), "images/frame_%04d.png", t);
        frame.image_path = buf;
        site.frames.push_back(std::move(frame));
    }
    for (int t = 0; t + 1 < config.n_frames; ++t) {
        AnnotatedPair pair;
        pair.frame_a = t;
        pair.frame_b = t + 1;
        for (const SynthEvent& ev : events)
            if (ev.onset == t + 1) pair.polygons.push_back(ev.region);
        site.annotated_pairs.push_back(std::move(pair));
    }
    seq.manifest.schema_version = 1;
    seq.manifest.sites.push_back(std::move(site));
    return seq;
}

}  // namespace vchange
