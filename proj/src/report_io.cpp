#include "vchange/report_io.hpp"

#include <cstdio>

#include "vchange/errors.hpp"

namespace vchange {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

ordered_json row_to_json(const ReportRow& row) {
    ordered_json j;
    j["name"] = row.name;
    j["pixel"] = {{"tp", row.confusion.tp},     {"fp", row.confusion.fp},
                  {"fn", row.confusion.fn},     {"tn", row.confusion.tn},
                  {"precision", row.pixel.precision}, {"recall", row.pixel.recall},
                  {"f1", row.pixel.f1},         {"iou", row.pixel.iou}};
    j["event"] = {{"tp", row.event.tp},
                  {"fp", row.event.fp},
                  {"fn", row.event.fn},
                  {"precision", row.event.precision},
                  {"recall", row.event.recall}};
    return j;
}

ReportRow row_from_json(const json& j) {
    ReportRow row;
    row.name = j.value("name", "");
    if (j.contains("pixel")) {
        const json& p = j["pixel"];
        row.confusion.tp = p.value("tp", 0ll);
        row.confusion.fp = p.value("fp", 0ll);
        row.confusion.fn = p.value("fn", 0ll);
        row.confusion.tn = p.value("tn", 0ll);
        row.pixel.precision = p.value("precision", 0.0);
        row.pixel.recall = p.value("recall", 0.0);
        row.pixel.f1 = p.value("f1", 0.0);
        row.pixel.iou = p.value("iou", 0.0);
    }
    if (j.contains("event")) {
        const json& e = j["event"];
        row.event.tp = e.value("tp", 0ll);
        row.event.fp = e.value("fp", 0ll);
        row.event.fn = e.value("fn", 0ll);
        row.event.precision = e.value("precision", 0.0);
        row.event.recall = e.value("recall", 0.0);
    }
    return row;
}

ordered_json pair_to_json(const PairEvaluation& pe) {
    ordered_json j;
    j["site"] = pe.site;
    j["frame_a"] = pe.frame_a;
    j["frame_b"] = pe.frame_b;
    j["missing_prediction"] = pe.missing_prediction;
    j["pixel"] = {{"tp", pe.confusion.tp},
                  {"fp", pe.confusion.fp},
                  {"fn", pe.confusion.fn},
                  {"tn", pe.confusion.tn}};
    ordered_json per_gt = ordered_json::array();
    for (const GtMatch& m : pe.events.per_gt) {
        per_gt.push_back({{"gt_index", m.gt_index},
                          {"merged_pred_area", m.merged_pred_area},
                          {"iou", m.iou},
                          {"verdict", m.verdict == EventVerdict::tp ? "tp" : "fn_fp"}});
    }
    j["event"] = {{"threshold", pe.events.threshold},
                  {"per_gt", std::move(per_gt)},
                  {"unmatched_pred_fps", pe.events.unmatched_pred_fps}};
    return j;
}

PairEvaluation pair_from_json(const json& j) {
    PairEvaluation pe;
    pe.site = j.value("site", "");
    pe.frame_a = j.value("frame_a", 0);
    pe.frame_b = j.value("frame_b", 0);
    pe.missing_prediction = j.value("missing_prediction", false);
    if (j.contains("pixel")) {
        const json& p = j["pixel"];
        pe.confusion.tp = p.value("tp", 0ll);
        pe.confusion.fp = p.value("fp", 0ll);
        pe.confusion.fn = p.value("fn", 0ll);
        pe.confusion.tn = p.value("tn", 0ll);
    }
    if (j.contains("event")) {
        const json& e = j["event"];
        pe.events.threshold = e.value("threshold", 0.25);
        pe.events.unmatched_pred_fps = e.value("unmatched_pred_fps", 0ll);
        if (e.contains("per_gt")) {
            for (const json& g : e["per_gt"]) {
                GtMatch m;
                m.gt_index = g.value("gt_index", 0);
                m.merged_pred_area = g.value("merged_pred_area", 0ll);
                m.iou = g.value("iou", 0.0);
                m.verdict = g.value("verdict", "fn_fp") == "tp" ? EventVerdict::tp
                                                                : EventVerdict::fn_fp;
                pe.events.per_gt.push_back(m);
            }
        }
    }
    return pe;
}

std::string pct(double ratio) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", ratio * 100.0);
    return buf;
}

// Site names go through CSV quoting when they contain separators.
std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

}  // namespace

ordered_json report_to_json(const MetricsReport& report, const ordered_json& config) {
    ordered_json j;
    j["schema_version"] = 1;
    j["iou_threshold"] = report.iou_threshold;
    if (!config.is_null()) j["config"] = config;
    j["missing_predictions"] = report.missing_predictions;
    ordered_json rows = ordered_json::array();
    for (const ReportRow& row : report.per_site) rows.push_back(row_to_json(row));
    if (!report.overall.name.empty()) rows.push_back(row_to_json(report.overall));
    j["rows"] = std::move(rows);
    ordered_json pairs = ordered_json::array();
    for (const PairEvaluation& pe : report.pairs) pairs.push_back(pair_to_json(pe));
    j["pairs"] = std::move(pairs);
    return j;
}

MetricsReport report_from_json(const json& j) {
    MetricsReport report;
    report.iou_threshold = j.value("iou_threshold", 0.25);
    report.missing_predictions = j.value("missing_predictions", 0ll);
    if (j.contains("rows")) {
        for (const json& r : j["rows"]) {
            ReportRow row = row_from_json(r);
            if (row.name == "overall")
                report.overall = row;
            else
                report.per_site.push_back(row);
        }
    }
    if (j.contains("pairs"))
        for (const json& p : j["pairs"]) report.pairs.push_back(pair_from_json(p));
    return report;
}

std::string report_to_csv(const MetricsReport& report) {
    std::string out = "name,precision,recall,f1,iou,event_tp,event_fp,event_fn\n";
    auto emit = [&](const ReportRow& row) {
        out += csv_field(row.name);
        out += ',' + pct(row.event.precision);
        out += ',' + pct(row.event.recall);
        out += ',' + pct(row.pixel.f1);
        out += ',' + pct(row.pixel.iou);
        out += ',' + std::to_string(row.event.tp);
        out += ',' + std::to_string(row.event.fp);
        out += ',' + std::to_string(row.event.fn);
        out += '\n';
    };
    for (const ReportRow& row : report.per_site) emit(row);
    if (!report.overall.name.empty()) emit(report.overall);
    return out;
}

}  // namespace vchange
