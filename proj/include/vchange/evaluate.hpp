#pragma once

#include <filesystem>

#include "vchange/datamodel.hpp"
#include "vchange/metrics.hpp"

namespace vchange {

struct EvaluateOptions {
    Split split = Split::test;
    double iou_threshold = 0.25;
    int jobs = 1;
};

// Scores every annotated pair of the split against prediction masks stored
// as <predictions_dir>/<site>/<frame_a>_<frame_b>.png. A missing prediction
// is scored as an all-empty mask and flagged. Ground truth for pixel metrics
// is the union of the pair's rasterized polygons.
MetricsReport evaluate_predictions(const Manifest& manifest,
                                   const std::filesystem::path& predictions_dir,
                                   const EvaluateOptions& options);

// The prediction file name convention used above.
std::filesystem::path prediction_path(const std::filesystem::path& predictions_dir,
                                      const std::string& site, int frame_a, int frame_b);

}  // namespace vchange
