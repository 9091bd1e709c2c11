#pragma once

#include <string>
#include <vector>

#include "vchange/geometry.hpp"
#include "vchange/raster.hpp"

namespace vchange {

struct Confusion {
    long long tp = 0, fp = 0, fn = 0, tn = 0;
    Confusion& operator+=(const Confusion& other);
    bool operator==(const Confusion&) const = default;
};

struct PixelScores {
    double precision = 0.0, recall = 0.0, f1 = 0.0, iou = 0.0;
};

enum class EventVerdict { tp, fn_fp };

// Per-ground-truth match result: the union of all prediction components that
// touch this polygon, and the IoU of that merged mask against it.
struct GtMatch {
    int gt_index = 0;
    long long merged_pred_area = 0;
    double iou = 0.0;
    EventVerdict verdict = EventVerdict::fn_fp;
};

struct EventMatchOutcome {
    std::vector<GtMatch> per_gt;
    long long unmatched_pred_fps = 0;  // prediction components touching no GT
    double threshold = 0.25;
};

struct EventScores {
    long long tp = 0, fp = 0, fn = 0;
    double precision = 0.0, recall = 0.0;
};

Confusion pixel_confusion(const BinaryMask& pred, const BinaryMask& gt);

// precision = tp/(tp+fp), recall = tp/(tp+fn), f1 = 2tp/(2tp+fp+fn),
// iou = tp/(tp+fp+fn). Any 0/0 ratio is 1.0 when tp = fp = fn = 0 (perfect
// empty agreement), otherwise 0.0.
PixelScores pixel_scores(const Confusion& c);

// Event-level matching: prediction components that spatially intersect a GT
// polygon are merged into a single mask per GT; the match is a TP iff the
// IoU of the merged mask against the GT mask strictly exceeds the threshold,
// otherwise it counts as both an FN and an FP. Components intersecting no GT
// each contribute one unmatched FP; a component touching several GTs joins
// every merge and is never an unmatched FP.
EventMatchOutcome event_match(const BinaryMask& pred,
                              const std::vector<PolygonAnnotation>& gt_polygons,
                              double iou_threshold = 0.25);

EventScores event_scores(const EventMatchOutcome& outcome);

// Same contract as event_match, implemented with explicit per-pixel sets and
// naive set operations; used for equivalence testing. Guarded to <= 256x256.
EventMatchOutcome brute_force_event_match(const BinaryMask& pred,
                                          const std::vector<PolygonAnnotation>& gt_polygons,
                                          double iou_threshold = 0.25);

// One evaluated image pair.
struct PairEvaluation {
    std::string site;
    int frame_a = 0, frame_b = 0;
    Confusion confusion;
    EventMatchOutcome events;
    bool missing_prediction = false;
};

struct ReportRow {
    std::string name;
    Confusion confusion;
    PixelScores pixel;
    EventScores event;
};

struct MetricsReport {
    double iou_threshold = 0.25;
    std::vector<ReportRow> per_site;  // sorted by site name
    ReportRow overall;
    std::vector<PairEvaluation> pairs;
    long long missing_predictions = 0;
};

// Micro-aggregation: pixel confusions and event tallies are summed before
// ratios are computed, overall and per site.
MetricsReport aggregate(const std::vector<PairEvaluation>& pair_results);

}  // namespace vchange
