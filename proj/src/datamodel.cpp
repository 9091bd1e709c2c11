#include "vchange/datamodel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include <json.hpp>

#include "vchange/errors.hpp"
#include "vchange/rng.hpp"

namespace vchange {

using nlohmann::json;
using nlohmann::ordered_json;

Split parse_split(const std::string& text) {
    if (text == "train") return Split::train;
    if (text == "validation") return Split::validation;
    if (text == "test") return Split::test;
    throw ValidationError("unknown split '" + text + "' (expected train|validation|test)");
}

std::string to_string(Split split) {
    switch (split) {
        case Split::train: return "train";
        case Split::validation: return "validation";
        case Split::test: return "test";
    }
    throw InternalError("to_string(Split): bad enum value");
}

namespace {

// Howard Hinnant's civil-date algorithms; exact for the proleptic Gregorian
// calendar, no timezone machinery involved.
int64_t days_from_civil(int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

void civil_from_days(int64_t z, int64_t& y, unsigned& m, unsigned& d) {
    z += 719468;
    const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp < 10 ? mp + 3 : mp - 9;
    y += m <= 2;
}

}  // namespace

int64_t parse_iso8601_utc(const std::string& text) {
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
    char tail = 0;
    if (std::sscanf(text.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%c", &y, &mo, &d, &h, &mi, &s, &tail) !=
            7 ||
        tail != 'Z')
        throw ValidationError("bad timestamp '" + text + "' (expected YYYY-MM-DDTHH:MM:SSZ)");
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || s > 60 || h < 0 || mi < 0 ||
        s < 0)
        throw ValidationError("timestamp field out of range: '" + text + "'");
    return days_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d)) * 86400 +
           h * 3600 + mi * 60 + s;
}

std::string format_iso8601_utc(int64_t epoch_seconds) {
    int64_t days = epoch_seconds / 86400;
    int64_t rem = epoch_seconds % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    int64_t y;
    unsigned mo, d;
    civil_from_days(days, y, mo, d);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ",
                  static_cast<long long>(y), mo, d, static_cast<long long>(rem / 3600),
                  static_cast<long long>((rem / 60) % 60), static_cast<long long>(rem % 60));
    return buf;
}

namespace {

const json& require(const json& j, const char* key, const char* ctx) {
    if (!j.contains(key))
        throw ValidationError(std::string("manifest: missing field '") + key + "' in " + ctx);
    return j.at(key);
}

int64_t parse_timestamp_field(const json& j) {
    if (j.is_number_integer()) return j.get<int64_t>();
    if (j.is_string()) return parse_iso8601_utc(j.get<std::string>());
    throw ValidationError("manifest: timestamp must be an ISO-8601 string or integer seconds");
}

PolygonAnnotation parse_polygon(const json& j) {
    if (!j.is_array()) throw ValidationError("manifest: polygon must be an array of [x,y] pairs");
    PolygonAnnotation poly;
    for (const json& v : j) {
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
            throw ValidationError("manifest: polygon vertex must be a numeric [x,y] pair");
        poly.vertices.push_back({v[0].get<double>(), v[1].get<double>()});
    }
    return poly;
}

}  // namespace

Manifest parse_manifest(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("manifest: malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ValidationError("manifest: top level must be an object");

    Manifest manifest;
    const json& ver = require(doc, "schema_version", "manifest");
    if (!ver.is_number_integer())
        throw ValidationError("manifest: schema_version must be an integer");
    manifest.schema_version = ver.get<int>();
    if (manifest.schema_version != 1)
        throw ValidationError("manifest: unknown schema_version " +
                              std::to_string(manifest.schema_version));

    const json& sites = require(doc, "sites", "manifest");
    if (!sites.is_array()) throw ValidationError("manifest: 'sites' must be an array");

    std::set<std::string> names;
    for (const json& js : sites) {
        Site site;
        site.name = require(js, "name", "site").get<std::string>();
        if (!names.insert(site.name).second)
            throw ValidationError("manifest: duplicate site name '" + site.name + "'");
        site.split = parse_split(require(js, "split", "site").get<std::string>());
        site.width = require(js, "width", "site").get<int>();
        site.height = require(js, "height", "site").get<int>();

        for (const json& jf : require(js, "frames", "site")) {
            Frame frame;
            frame.index = require(jf, "index", "frame").get<int>();
            frame.timestamp = parse_timestamp_field(require(jf, "timestamp", "frame"));
            frame.image_path = require(jf, "image_path", "frame").get<std::string>();
            site.frames.push_back(std::move(frame));
        }

        if (js.contains("annotated_pairs")) {
            for (const json& jp : js.at("annotated_pairs")) {
                AnnotatedPair pair;
                pair.frame_a = require(jp, "frame_a", "annotated_pair").get<int>();
                pair.frame_b = require(jp, "frame_b", "annotated_pair").get<int>();
                for (const json& poly : require(jp, "polygons", "annotated_pair"))
                    pair.polygons.push_back(parse_polygon(poly));
                site.annotated_pairs.push_back(std::move(pair));
            }
        }
        manifest.sites.push_back(std::move(site));
    }
    return manifest;
}

std::string serialize_manifest(const Manifest& manifest) {
    ordered_json doc;
    doc["schema_version"] = manifest.schema_version;
    ordered_json sites = ordered_json::array();
    for (const Site& site : manifest.sites) {
        ordered_json js;
        js["name"] = site.name;
        js["split"] = to_string(site.split);
        js["width"] = site.width;
        js["height"] = site.height;
        ordered_json frames = ordered_json::array();
        for (const Frame& frame : site.frames) {
            frames.push_back({{"index", frame.index},
                              {"timestamp", format_iso8601_utc(frame.timestamp)},
                              {"image_path", frame.image_path}});
        }
        js["frames"] = std::move(frames);
        ordered_json pairs = ordered_json::array();
        for (const AnnotatedPair& pair : site.annotated_pairs) {
            ordered_json polys = ordered_json::array();
            for (const PolygonAnnotation& poly : pair.polygons) {
                ordered_json verts = ordered_json::array();
                for (const auto& v : poly.vertices) verts.push_back({v[0], v[1]});
                polys.push_back(std::move(verts));
            }
            pairs.push_back(
                {{"frame_a", pair.frame_a}, {"frame_b", pair.frame_b}, {"polygons", std::move(polys)}});
        }
        js["annotated_pairs"] = std::move(pairs);
        sites.push_back(std::move(js));
    }
    doc["sites"] = std::move(sites);
    return doc.dump(2) + "\n";
}

ValidationReport validate(const Manifest& manifest) {
    ValidationReport report;
    auto add = [&](const std::string& site, const std::string& kind, const std::string& msg) {
        report.push_back(Violation{site, kind, msg});
    };

    std::set<std::string> names;
    for (const Site& site : manifest.sites) {
        if (!names.insert(site.name).second)
            add(site.name, "duplicate_site", "site name appears more than once");

        if (site.width < 1 || site.height < 1)
            add(site.name, "bad_dimensions", "site width/height must be >= 1");

        for (size_t i = 0; i < site.frames.size(); ++i) {
            const Frame& f = site.frames[i];
            if (f.timestamp < 0)
                add(site.name, "negative_timestamp",
                    "frame " + std::to_string(f.index) + " has timestamp before epoch");
            if (f.image_path.empty())
                add(site.name, "empty_path", "frame " + std::to_string(f.index) + " has no path");
            if (i > 0 && site.frames[i].timestamp <= site.frames[i - 1].timestamp)
                add(site.name, "timestamp_order",
                    "frame timestamps not strictly increasing at index " + std::to_string(i));
        }

        const int n_frames = static_cast<int>(site.frames.size());
        for (size_t pi = 0; pi < site.annotated_pairs.size(); ++pi) {
            const AnnotatedPair& pair = site.annotated_pairs[pi];
            const std::string where = "annotated_pair " + std::to_string(pi);
            if (pair.frame_a < 0 || pair.frame_a >= n_frames || pair.frame_b < 0 ||
                pair.frame_b >= n_frames)
                add(site.name, "dangling_reference", where + " references a missing frame");
            if (pair.frame_a >= pair.frame_b)
                add(site.name, "pair_order", where + " must have frame_a < frame_b");
            for (size_t qi = 0; qi < pair.polygons.size(); ++qi) {
                const PolygonAnnotation& poly = pair.polygons[qi];
                const std::string pwhere = where + " polygon " + std::to_string(qi);
                if (poly.vertices.size() < 3) {
                    add(site.name, "degenerate_polygon", pwhere + " has fewer than 3 vertices");
                    continue;
                }
                const Box2d box = polygon_bbox(poly);
                if (box.min_x < 0 || box.min_y < 0 || box.max_x > site.width ||
                    box.max_y > site.height)
                    add(site.name, "out_of_bounds", pwhere + " leaves the site raster");
                if (!polygon_is_simple(poly))
                    add(site.name, "self_intersecting", pwhere + " is not a simple polygon");
            }
        }
    }
    return report;
}

std::vector<LabeledPair> labeled_pairs(const Manifest& manifest, Split split, bool changes_only) {
    std::vector<LabeledPair> out;
    for (const Site& site : manifest.sites) {
        if (site.split != split) continue;
        for (const AnnotatedPair& pair : site.annotated_pairs) {
            if (changes_only && pair.polygons.empty()) continue;
            LabeledPair lp;
            lp.pair.site = site.name;
            lp.pair.frame_a = pair.frame_a;
            lp.pair.frame_b = pair.frame_b;
            if (pair.frame_a >= 0 && pair.frame_a < static_cast<int>(site.frames.size()) &&
                pair.frame_b >= 0 && pair.frame_b < static_cast<int>(site.frames.size()))
                lp.pair.gap_seconds =
                    site.frames[pair.frame_b].timestamp - site.frames[pair.frame_a].timestamp;
            lp.polygons = pair.polygons;
            out.push_back(std::move(lp));
        }
    }
    std::sort(out.begin(), out.end(), [](const LabeledPair& a, const LabeledPair& b) {
        if (a.pair.site != b.pair.site) return a.pair.site < b.pair.site;
        if (a.pair.frame_a != b.pair.frame_a) return a.pair.frame_a < b.pair.frame_a;
        return a.pair.frame_b < b.pair.frame_b;
    });
    return out;
}

std::vector<FramePair> sample_unlabeled_pairs(const Manifest& manifest, Split split,
                                              int64_t max_gap_seconds, size_t count,
                                              uint64_t seed) {
    if (max_gap_seconds <= 0) throw UsageError("sample_unlabeled_pairs: max_gap must be > 0");

    // Canonically ordered eligible pool: manifest site order, then (a, b).
    std::vector<FramePair> pool;
    for (const Site& site : manifest.sites) {
        if (site.split != split) continue;
        std::set<std::pair<int, int>> annotated;
        for (const AnnotatedPair& pair : site.annotated_pairs)
            annotated.insert({pair.frame_a, pair.frame_b});
        const int n = static_cast<int>(site.frames.size());
        for (int a = 0; a < n; ++a) {
            for (int b = a + 1; b < n; ++b) {
                const int64_t gap = site.frames[b].timestamp - site.frames[a].timestamp;
                if (gap <= 0) continue;          // malformed ordering; skip rather than sample
                if (gap > max_gap_seconds) break;  // later frames are even farther
                if (annotated.count({a, b})) continue;
                pool.push_back(FramePair{site.name, a, b, gap});
            }
        }
    }

    Rng rng(seed);
    const size_t take = std::min(count, pool.size());
    for (size_t i = 0; i < take; ++i) {
        const size_t j = i + static_cast<size_t>(rng.bounded(pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(take);
    return pool;
}

long long mix_ratio_plan(long long n_labeled, double labeled_fraction) {
    if (!(labeled_fraction > 0.0) || labeled_fraction > 1.0)
        throw UsageError("mix_ratio_plan: labeled_fraction must be in (0, 1]");
    if (n_labeled < 0) throw UsageError("mix_ratio_plan: n_labeled must be >= 0");
    return std::llround(static_cast<double>(n_labeled) * (1.0 - labeled_fraction) /
                        labeled_fraction);
}

}  // namespace vchange
