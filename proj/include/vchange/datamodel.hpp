#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vchange/geometry.hpp"

namespace vchange {

enum class Split { train, validation, test };

Split parse_split(const std::string& text);
std::string to_string(Split split);

// ISO-8601 UTC ("2024-05-01T06:30:00Z") <-> seconds since epoch. Integer
// timestamps are also accepted on input; serialization always emits ISO.
int64_t parse_iso8601_utc(const std::string& text);
std::string format_iso8601_utc(int64_t epoch_seconds);

struct Frame {
    int index = 0;
    int64_t timestamp = 0;  // seconds since epoch, UTC
    std::string image_path;  // relative to the manifest's directory
};

// Possibly-empty polygon list; an empty list is an explicit verified
// no-change pair.
struct AnnotatedPair {
    int frame_a = 0;
    int frame_b = 0;
    std::vector<PolygonAnnotation> polygons;
};

struct Site {
    std::string name;
    Split split = Split::train;
    int width = 0;
    int height = 0;
    std::vector<Frame> frames;  // ordered by timestamp
    std::vector<AnnotatedPair> annotated_pairs;
};

struct Manifest {
    int schema_version = 1;
    std::vector<Site> sites;
};

// Errors on malformed documents, unknown schema versions, wrong field types,
// and duplicate site names. Content-level invariants (timestamp order,
// polygon bounds, dangling references) are left to validate().
Manifest parse_manifest(const std::string& text);
std::string serialize_manifest(const Manifest& manifest);

struct Violation {
    std::string site;
    std::string kind;
    std::string message;
};
using ValidationReport = std::vector<Violation>;

// Pure invariant check; violations are data, not errors.
ValidationReport validate(const Manifest& manifest);

struct FramePair {
    std::string site;
    int frame_a = 0;
    int frame_b = 0;
    int64_t gap_seconds = 0;
    bool operator==(const FramePair&) const = default;
};

struct LabeledPair {
    FramePair pair;
    std::vector<PolygonAnnotation> polygons;
};

// All annotated pairs of the split's sites, in (site name, frame_a, frame_b)
// order. changes_only drops pairs with empty polygon lists.
std::vector<LabeledPair> labeled_pairs(const Manifest& manifest, Split split,
                                       bool changes_only = false);

// Uniform sample, without replacement, of same-site pairs (a, b) with
// 0 < gap <= max_gap that are not already annotated. Deterministic for a
// fixed seed (mt19937_64 partial Fisher-Yates over the canonically ordered
// pool); returns fewer than count only if the eligible pool is smaller.
std::vector<FramePair> sample_unlabeled_pairs(const Manifest& manifest, Split split,
                                              int64_t max_gap_seconds, size_t count,
                                              uint64_t seed);

// Number of unlabeled pairs that makes labeled pairs the given fraction of
// the total: round(n_labeled * (1 - f) / f), half away from zero.
long long mix_ratio_plan(long long n_labeled, double labeled_fraction);

}  // namespace vchange
