#include "vchange/evaluate.hpp"

#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "vchange/errors.hpp"
#include "vchange/raster_io.hpp"

namespace vchange {

namespace {

template <typename Fn>
void parallel_for(size_t n, int jobs, Fn&& fn) {
    jobs = std::max(1, jobs);
    if (jobs == 1 || n <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        size_t i;
        while ((i = next.fetch_add(1)) < n) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> threads;
    const int n_threads = static_cast<int>(std::min<size_t>(jobs, n));
    threads.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

std::filesystem::path prediction_path(const std::filesystem::path& predictions_dir,
                                      const std::string& site, int frame_a, int frame_b) {
    return predictions_dir / site / (std::to_string(frame_a) + "_" + std::to_string(frame_b) + ".png");
}

MetricsReport evaluate_predictions(const Manifest& manifest,
                                   const std::filesystem::path& predictions_dir,
                                   const EvaluateOptions& options) {
    const std::vector<LabeledPair> pairs = labeled_pairs(manifest, options.split, false);
    if (pairs.empty())
        throw ValidationError("evaluate: no annotated pairs in split '" + to_string(options.split) +
                              "'");

    // Site dimensions by name, for missing predictions and dimension checks.
    struct Dims {
        int width, height;
    };
    std::map<std::string, Dims> dims;
    for (const Site& site : manifest.sites) dims[site.name] = {site.width, site.height};

    std::vector<PairEvaluation> results(pairs.size());
    parallel_for(pairs.size(), options.jobs, [&](size_t i) {
        const LabeledPair& lp = pairs[i];
        const Dims d = dims.at(lp.pair.site);

        PairEvaluation pe;
        pe.site = lp.pair.site;
        pe.frame_a = lp.pair.frame_a;
        pe.frame_b = lp.pair.frame_b;

        const auto path = prediction_path(predictions_dir, lp.pair.site, lp.pair.frame_a,
                                          lp.pair.frame_b);
        BinaryMask pred;
        if (std::filesystem::exists(path)) {
            pred = decode_mask_png(read_file(path));
            if (pred.width != d.width || pred.height != d.height)
                throw ValidationError("evaluate: prediction " + path.string() +
                                      " does not match the site resolution");
        } else {
            pred = BinaryMask(d.width, d.height);
            pe.missing_prediction = true;
        }

        BinaryMask gt(d.width, d.height);
        for (const PolygonAnnotation& poly : lp.polygons) {
            const BinaryMask m = rasterize_polygon(poly, d.width, d.height);
            for (size_t k = 0; k < gt.bits.size(); ++k)
                if (m.bits[k]) gt.bits[k] = 1;
        }

        pe.confusion = pixel_confusion(pred, gt);
        pe.events = event_match(pred, lp.polygons, options.iou_threshold);
        results[i] = std::move(pe);
    });

    return aggregate(results);
}

}  // namespace vchange
