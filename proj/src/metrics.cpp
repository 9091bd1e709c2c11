#include "vchange/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "vchange/errors.hpp"

namespace vchange {

Confusion& Confusion::operator+=(const Confusion& other) {
    tp += other.tp;
    fp += other.fp;
    fn += other.fn;
    tn += other.tn;
    return *this;
}

Confusion pixel_confusion(const BinaryMask& pred, const BinaryMask& gt) {
    if (pred.width != gt.width || pred.height != gt.height)
        throw ValidationError("pixel_confusion: dimension mismatch");
    Confusion c;
    for (size_t i = 0; i < pred.bits.size(); ++i) {
        const bool p = pred.bits[i] != 0;
        const bool g = gt.bits[i] != 0;
        if (p && g)
            ++c.tp;
        else if (p && !g)
            ++c.fp;
        else if (!p && g)
            ++c.fn;
        else
            ++c.tn;
    }
    return c;
}

namespace {

double ratio(long long num, long long den, bool perfect_empty) {
    if (den > 0) return static_cast<double>(num) / static_cast<double>(den);
    return perfect_empty ? 1.0 : 0.0;
}

}  // namespace

PixelScores pixel_scores(const Confusion& c) {
    const bool perfect = c.tp == 0 && c.fp == 0 && c.fn == 0;
    PixelScores s;
    s.precision = ratio(c.tp, c.tp + c.fp, perfect);
    s.recall = ratio(c.tp, c.tp + c.fn, perfect);
    s.f1 = ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn, perfect);
    s.iou = ratio(c.tp, c.tp + c.fp + c.fn, perfect);
    return s;
}

EventMatchOutcome event_match(const BinaryMask& pred,
                              const std::vector<PolygonAnnotation>& gt_polygons,
                              double iou_threshold) {
    if (!(iou_threshold >= 0.0 && iou_threshold < 1.0))
        throw UsageError("event_match: iou_threshold must be in [0, 1)");

    EventMatchOutcome outcome;
    outcome.threshold = iou_threshold;

    const ComponentLabeling labeling = connected_components(pred);
    const size_t n_comp = labeling.components.size();
    std::vector<uint8_t> touched(n_comp + 1, 0);

    for (size_t gi = 0; gi < gt_polygons.size(); ++gi) {
        const BinaryMask gmask = rasterize_polygon(gt_polygons[gi], pred.width, pred.height);

        // Scan only the polygon's bounding box; pixels outside it are unset.
        const Box2d box = polygon_bbox(gt_polygons[gi]);
        const int bx0 = std::max(0, static_cast<int>(std::floor(box.min_x)) - 1);
        const int by0 = std::max(0, static_cast<int>(std::floor(box.min_y)) - 1);
        const int bx1 = std::min(pred.width, static_cast<int>(std::ceil(box.max_x)) + 1);
        const int by1 = std::min(pred.height, static_cast<int>(std::ceil(box.max_y)) + 1);

        std::vector<uint8_t> in_merge(n_comp + 1, 0);
        long long gt_area = 0;
        long long inter = 0;
        for (int y = by0; y < by1; ++y) {
            for (int x = bx0; x < bx1; ++x) {
                if (!gmask.get(x, y)) continue;
                ++gt_area;
                const int32_t l = labeling.label_at(x, y);
                if (l != 0) {
                    ++inter;  // any component overlapping here joins the merge
                    in_merge[l] = 1;
                    touched[l] = 1;
                }
            }
        }
        long long merged_area = 0;
        for (const Component& c : labeling.components)
            if (in_merge[c.label]) merged_area += c.pixel_count;

        const long long uni = merged_area + gt_area - inter;
        const double iou = uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;

        GtMatch m;
        m.gt_index = static_cast<int>(gi);
        m.merged_pred_area = merged_area;
        m.iou = iou;
        m.verdict = iou > iou_threshold ? EventVerdict::tp : EventVerdict::fn_fp;
        outcome.per_gt.push_back(m);
    }

    for (const Component& c : labeling.components)
        if (!touched[c.label]) ++outcome.unmatched_pred_fps;

    return outcome;
}

EventScores event_scores(const EventMatchOutcome& outcome) {
    EventScores s;
    for (const GtMatch& m : outcome.per_gt) {
        if (m.verdict == EventVerdict::tp)
            ++s.tp;
        else
            ++s.fn;
    }
    // Each below-threshold GT counts as both a false negative and a false
    // positive, on top of the predictions that touch no GT at all.
    s.fp = outcome.unmatched_pred_fps + s.fn;
    const bool perfect = s.tp == 0 && s.fp == 0 && s.fn == 0;
    s.precision = ratio(s.tp, s.tp + s.fp, perfect);
    s.recall = ratio(s.tp, s.tp + s.fn, perfect);
    return s;
}

namespace {

using PixelSet = std::set<std::pair<int, int>>;

std::vector<PixelSet> flood_fill_components(const BinaryMask& mask) {
    std::vector<PixelSet> comps;
    std::vector<uint8_t> seen(mask.bits.size(), 0);
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            const size_t idx = static_cast<size_t>(y) * mask.width + x;
            if (!mask.bits[idx] || seen[idx]) continue;
            PixelSet comp;
            std::vector<std::pair<int, int>> stack{{x, y}};
            seen[idx] = 1;
            while (!stack.empty()) {
                auto [cx, cy] = stack.back();
                stack.pop_back();
                comp.insert({cx, cy});
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (dx == 0 && dy == 0) continue;
                        const int nx = cx + dx;
                        const int ny = cy + dy;
                        if (nx < 0 || nx >= mask.width || ny < 0 || ny >= mask.height) continue;
                        const size_t nidx = static_cast<size_t>(ny) * mask.width + nx;
                        if (!mask.bits[nidx] || seen[nidx]) continue;
                        seen[nidx] = 1;
                        stack.push_back({nx, ny});
                    }
                }
            }
            comps.push_back(std::move(comp));
        }
    }
    return comps;
}

PixelSet polygon_pixel_set(const PolygonAnnotation& poly, int width, int height) {
    PixelSet set;
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            if (point_in_polygon(poly, x + 0.5, y + 0.5)) set.insert({x, y});
    return set;
}

bool sets_intersect(const PixelSet& a, const PixelSet& b) {
    const PixelSet& small = a.size() <= b.size() ? a : b;
    const PixelSet& big = a.size() <= b.size() ? b : a;
    for (const auto& p : small)
        if (big.count(p)) return true;
    return false;
}

}  // namespace

EventMatchOutcome brute_force_event_match(const BinaryMask& pred,
                                          const std::vector<PolygonAnnotation>& gt_polygons,
                                          double iou_threshold) {
    if (pred.width > 256 || pred.height > 256)
        throw UsageError("brute_force_event_match: raster exceeds the 256x256 guard");
    if (!(iou_threshold >= 0.0 && iou_threshold < 1.0))
        throw UsageError("brute_force_event_match: iou_threshold must be in [0, 1)");

    EventMatchOutcome outcome;
    outcome.threshold = iou_threshold;

    const std::vector<PixelSet> comps = flood_fill_components(pred);
    std::vector<uint8_t> touched(comps.size(), 0);

    for (size_t gi = 0; gi < gt_polygons.size(); ++gi) {
        const PixelSet gt = polygon_pixel_set(gt_polygons[gi], pred.width, pred.height);
        PixelSet merged;
        for (size_t ci = 0; ci < comps.size(); ++ci) {
            if (sets_intersect(comps[ci], gt)) {
                touched[ci] = 1;
                merged.insert(comps[ci].begin(), comps[ci].end());
            }
        }
        PixelSet inter;
        std::set_intersection(merged.begin(), merged.end(), gt.begin(), gt.end(),
                              std::inserter(inter, inter.begin()));
        PixelSet uni;
        std::set_union(merged.begin(), merged.end(), gt.begin(), gt.end(),
                       std::inserter(uni, uni.begin()));
        const double iou =
            uni.empty() ? 0.0 : static_cast<double>(inter.size()) / static_cast<double>(uni.size());

        GtMatch m;
        m.gt_index = static_cast<int>(gi);
        m.merged_pred_area = static_cast<long long>(merged.size());
        m.iou = iou;
        m.verdict = iou > iou_threshold ? EventVerdict::tp : EventVerdict::fn_fp;
        outcome.per_gt.push_back(m);
    }

    for (size_t ci = 0; ci < comps.size(); ++ci)
        if (!touched[ci]) ++outcome.unmatched_pred_fps;

    return outcome;
}

MetricsReport aggregate(const std::vector<PairEvaluation>& pair_results) {
    if (pair_results.empty()) throw ValidationError("aggregate: empty pair list");

    MetricsReport report;
    report.iou_threshold = pair_results.front().events.threshold;
    report.pairs = pair_results;

    struct Tally {
        Confusion confusion;
        long long etp = 0, efp = 0, efn = 0;
    };
    Tally overall;
    std::map<std::string, Tally> by_site;

    for (const PairEvaluation& pe : pair_results) {
        const EventScores es = event_scores(pe.events);
        for (Tally* t : {&overall, &by_site[pe.site]}) {
            t->confusion += pe.confusion;
            t->etp += es.tp;
            t->efp += es.fp;
            t->efn += es.fn;
        }
        if (pe.missing_prediction) ++report.missing_predictions;
    }

    auto make_row = [](const std::string& name, const Tally& t) {
        ReportRow row;
        row.name = name;
        row.confusion = t.confusion;
        row.pixel = pixel_scores(t.confusion);
        row.event.tp = t.etp;
        row.event.fp = t.efp;
        row.event.fn = t.efn;
        const bool perfect = t.etp == 0 && t.efp == 0 && t.efn == 0;
        row.event.precision = ratio(t.etp, t.etp + t.efp, perfect);
        row.event.recall = ratio(t.etp, t.etp + t.efn, perfect);
        return row;
    };

    for (const auto& [site, tally] : by_site)
        report.per_site.push_back(make_row(site, tally));
    report.overall = make_row("overall", overall);
    return report;
}

}  // namespace vchange
