#pragma once

#include <string>

#include <json.hpp>

#include "vchange/metrics.hpp"

namespace vchange {

// JSON carries raw ratios plus the underlying counts; `config` (may be null)
// is echoed into the report header for reproducibility.
nlohmann::ordered_json report_to_json(const MetricsReport& report,
                                      const nlohmann::ordered_json& config = nullptr);

// Rebuilds a report from its JSON form. Rows are taken as written (ratios are
// not recomputed), so hand-written aggregates render verbatim.
MetricsReport report_from_json(const nlohmann::json& j);

// One row per site plus the overall row. The precision/recall columns are
// event-wise, f1/iou pixel-wise; all four as percentages with 2 decimals.
std::string report_to_csv(const MetricsReport& report);

}  // namespace vchange
