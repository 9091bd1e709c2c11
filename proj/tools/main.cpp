// vchange: volumetric change detection toolkit CLI.
//
// Subcommands: validate, sample-pairs, detect, ingest, evaluate, synth,
// report. Every seeded command is deterministic: running it twice with the
// same inputs produces byte-identical artifacts.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vchange/baseline.hpp"
#include "vchange/changemap.hpp"
#include "vchange/datamodel.hpp"
#include "vchange/errors.hpp"
#include "vchange/evaluate.hpp"
#include "vchange/metrics.hpp"
#include "vchange/raster_io.hpp"
#include "vchange/report_io.hpp"
#include "vchange/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;
using namespace vchange;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitValidation = 3;
constexpr int kExitInternal = 4;

void print_config(const ordered_json& config) {
    std::cout << "config: " << config.dump() << "\n";
}

Manifest load_manifest(const fs::path& path) {
    const std::vector<uint8_t> bytes = read_file(path);
    return parse_manifest(std::string(bytes.begin(), bytes.end()));
}

void require_valid(const Manifest& manifest) {
    const ValidationReport report = validate(manifest);
    if (report.empty()) return;
    for (const Violation& v : report)
        std::cerr << "violation [" << v.site << "] " << v.kind << ": " << v.message << "\n";
    throw ValidationError("manifest has " + std::to_string(report.size()) + " violation(s)");
}

// ---------------------------------------------------------------- validate

int cmd_validate(const fs::path& manifest_path) {
    const Manifest manifest = load_manifest(manifest_path);
    const ValidationReport report = validate(manifest);
    if (report.empty()) {
        std::cout << "OK: " << manifest.sites.size() << " site(s), no violations\n";
        return kExitOk;
    }
    for (const Violation& v : report)
        std::cout << "violation [" << v.site << "] " << v.kind << ": " << v.message << "\n";
    std::cout << report.size() << " violation(s)\n";
    return kExitValidation;
}

// ------------------------------------------------------------ sample-pairs

struct SamplePairsArgs {
    fs::path manifest_path;
    std::string split = "train";
    int64_t max_gap = 604800;  // one week, inclusive
    double labeled_fraction = 0.4;
    int64_t count = -1;  // -1: derive from labeled count via the mix plan
    uint64_t seed = 0;
    bool include_empty = false;
    std::string out;
};

int cmd_sample_pairs(const SamplePairsArgs& args) {
    const Manifest manifest = load_manifest(args.manifest_path);
    require_valid(manifest);
    const Split split = parse_split(args.split);

    const auto labeled = labeled_pairs(manifest, split, !args.include_empty);
    const long long unlabeled_count =
        args.count >= 0 ? args.count
                        : mix_ratio_plan(static_cast<long long>(labeled.size()),
                                         args.labeled_fraction);
    const auto unlabeled =
        sample_unlabeled_pairs(manifest, split, args.max_gap,
                               static_cast<size_t>(std::max<long long>(unlabeled_count, 0)),
                               args.seed);

    ordered_json config{{"command", "sample-pairs"},
                        {"split", args.split},
                        {"max_gap_seconds", args.max_gap},
                        {"labeled_fraction", args.labeled_fraction},
                        {"requested_unlabeled", unlabeled_count},
                        {"seed", args.seed},
                        {"include_empty", args.include_empty}};
    print_config(config);

    ordered_json out;
    out["config"] = config;
    ordered_json jl = ordered_json::array();
    for (const LabeledPair& lp : labeled) {
        jl.push_back({{"site", lp.pair.site},
                      {"frame_a", lp.pair.frame_a},
                      {"frame_b", lp.pair.frame_b},
                      {"gap_seconds", lp.pair.gap_seconds},
                      {"n_polygons", lp.polygons.size()}});
    }
    out["labeled"] = std::move(jl);
    ordered_json ju = ordered_json::array();
    for (const FramePair& fp : unlabeled) {
        ju.push_back({{"site", fp.site},
                      {"frame_a", fp.frame_a},
                      {"frame_b", fp.frame_b},
                      {"gap_seconds", fp.gap_seconds}});
    }
    out["unlabeled"] = std::move(ju);

    const std::string text = out.dump(2) + "\n";
    if (args.out.empty()) {
        std::cout << text;
    } else {
        write_file(args.out, text);
        std::cout << "wrote " << args.out << " (" << labeled.size() << " labeled, "
                  << unlabeled.size() << " unlabeled)\n";
    }
    return kExitOk;
}

// ----------------------------------------------------------------- detect

struct DetectArgs {
    fs::path image_a, image_b, out;
    std::string method = "ncc";
    int block = 16;
    int stride = 0;  // 0: block / 2
    std::string rule = "sigma:2";
    long long min_area = 0;
    int patch = 1024;
    int overlap = 64;
};

int cmd_detect(const DetectArgs& args) {
    DetectorConfig config;
    if (args.method == "ncc")
        config.method = DetectorConfig::Method::ncc;
    else if (args.method == "norm-diff")
        config.method = DetectorConfig::Method::norm_diff;
    else
        throw UsageError("detect: --method must be ncc or norm-diff");
    config.block = args.block;
    config.stride = args.stride > 0 ? args.stride : std::max(1, args.block / 2);
    config.rule = ThresholdRule::parse(args.rule);
    config.min_area = args.min_area;
    config.patch = args.patch;
    config.overlap = args.overlap;
    config.check();

    print_config(ordered_json{{"command", "detect"},
                              {"method", args.method},
                              {"block", config.block},
                              {"stride", config.stride},
                              {"rule", config.rule.to_string()},
                              {"min_area", config.min_area},
                              {"patch", config.patch},
                              {"overlap", config.overlap}});

    const RgbImage a = decode_rgb_png(read_file(args.image_a));
    const RgbImage b = decode_rgb_png(read_file(args.image_b));
    const BinaryMask mask = detect(a, b, config);
    write_file(args.out, encode_mask_png(mask));
    std::cout << "wrote " << args.out.string() << " (" << mask.count() << " change pixels)\n";
    return kExitOk;
}

// ----------------------------------------------------------------- ingest

struct IngestArgs {
    std::vector<fs::path> inputs;
    std::string kind;  // confidence | depth | activation
    fs::path out;
    std::string rule = "sigma:2";
    long long min_area = 0;
    int width = 0, height = 0;  // 0: keep the score raster's dims
};

int cmd_ingest(const IngestArgs& args) {
    const ThresholdRule rule = ThresholdRule::parse(args.rule);
    ChangeMapInput input;
    if (args.kind == "confidence" || args.kind == "activation") {
        if (args.inputs.size() != 1)
            throw UsageError("ingest: kind '" + args.kind + "' takes exactly one FR32 file");
        FloatRaster score = decode_fr32(read_file(args.inputs[0]));
        if (args.kind == "confidence")
            input = ConfidenceInput{std::move(score)};
        else
            input = ActivationInput{std::move(score)};
    } else if (args.kind == "depth") {
        if (args.inputs.size() != 2)
            throw UsageError("ingest: kind 'depth' takes exactly two FR32 files");
        input = DepthPairInput{decode_fr32(read_file(args.inputs[0])),
                               decode_fr32(read_file(args.inputs[1]))};
    } else {
        throw UsageError("ingest: --kind must be confidence, depth, or activation");
    }

    const FloatRaster& first =
        args.kind == "depth"
            ? std::get<DepthPairInput>(input).depth_a
            : (args.kind == "confidence" ? std::get<ConfidenceInput>(input).confidence
                                         : std::get<ActivationInput>(input).activation);
    const int target_w = args.width > 0 ? args.width : first.width;
    const int target_h = args.height > 0 ? args.height : first.height;

    print_config(ordered_json{{"command", "ingest"},
                              {"kind", args.kind},
                              {"rule", rule.to_string()},
                              {"min_area", args.min_area},
                              {"target_width", target_w},
                              {"target_height", target_h}});

    const BinaryMask mask = derive_change_map(input, rule, args.min_area, target_w, target_h);
    write_file(args.out, encode_mask_png(mask));
    std::cout << "wrote " << args.out.string() << " (" << mask.count() << " change pixels)\n";
    return kExitOk;
}

// --------------------------------------------------------------- evaluate

struct EvaluateArgs {
    fs::path manifest_path;
    fs::path predictions_dir;
    std::string split = "test";
    double iou_threshold = 0.25;
    std::string out = "report";
    int jobs = 1;
};

int cmd_evaluate(const EvaluateArgs& args) {
    const Manifest manifest = load_manifest(args.manifest_path);
    require_valid(manifest);

    EvaluateOptions options;
    options.split = parse_split(args.split);
    options.iou_threshold = args.iou_threshold;
    options.jobs = args.jobs;

    const ordered_json config{{"command", "evaluate"},
                              {"manifest", args.manifest_path.string()},
                              {"predictions", args.predictions_dir.string()},
                              {"split", args.split},
                              {"iou_threshold", args.iou_threshold},
                              {"jobs", args.jobs}};
    print_config(config);

    const MetricsReport report = evaluate_predictions(manifest, args.predictions_dir, options);
    const fs::path json_path = args.out + ".json";
    const fs::path csv_path = args.out + ".csv";
    write_file(json_path, report_to_json(report, config).dump(2) + "\n");
    write_file(csv_path, report_to_csv(report));

    char line[256];
    std::snprintf(line, sizeof(line),
                  "overall: precision %.2f%% recall %.2f%% f1 %.2f%% iou %.2f%% (events tp=%lld "
                  "fp=%lld fn=%lld)",
                  report.overall.event.precision * 100.0, report.overall.event.recall * 100.0,
                  report.overall.pixel.f1 * 100.0, report.overall.pixel.iou * 100.0,
                  report.overall.event.tp, report.overall.event.fp, report.overall.event.fn);
    std::cout << line << "\n";
    if (report.missing_predictions > 0)
        std::cout << "flagged " << report.missing_predictions
                  << " missing prediction(s), scored as empty masks\n";
    std::cout << "wrote " << json_path.string() << " and " << csv_path.string() << "\n";
    return kExitOk;
}

// ------------------------------------------------------------------ synth

struct SynthArgs {
    fs::path config_path;
    fs::path out_dir;
    int64_t seed = -1;  // -1: keep the config file's seed
};

int cmd_synth(const SynthArgs& args) {
    SynthConfig config;
    if (!args.config_path.empty()) {
        const std::vector<uint8_t> bytes = read_file(args.config_path);
        json doc;
        try {
            doc = json::parse(bytes.begin(), bytes.end());
        } catch (const json::parse_error& e) {
            throw ValidationError(std::string("synth: malformed config JSON: ") + e.what());
        }
        config = SynthConfig::from_json(doc);
    }
    if (args.seed >= 0) config.seed = static_cast<uint64_t>(args.seed);
    config.check();

    ordered_json jconfig = config.to_json();
    jconfig["command"] = "synth";
    print_config(jconfig);

    const SynthSequence seq = generate(config);

    const DefinitionCheck check =
        verify_definition(seq.depth, seq.events, config.epsilon, config.tau);
    if (!check.ok) throw InternalError("synth: generated sequence fails its own definition check");

    write_file(args.out_dir / "manifest.json", serialize_manifest(seq.manifest));
    const Site& site = seq.manifest.sites.front();
    for (size_t t = 0; t < seq.images.size(); ++t) {
        write_file(args.out_dir / site.frames[t].image_path, encode_rgb_png(seq.images[t]));
        char buf[64];
        std::snprintf(buf, sizeof(buf), "depth/frame_%04zu.fr32", t);
        write_file(args.out_dir / buf, encode_fr32(seq.depth.frames[t]));
    }
    std::cout << "wrote " << seq.images.size() << " frames, " << seq.events.size() << " events to "
              << args.out_dir.string() << "\n";
    return kExitOk;
}

// ----------------------------------------------------------------- report

int cmd_report(const fs::path& report_json, const fs::path& out_csv) {
    const std::vector<uint8_t> bytes = read_file(report_json);
    json doc;
    try {
        doc = json::parse(bytes.begin(), bytes.end());
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("report: malformed JSON: ") + e.what());
    }
    const MetricsReport report = report_from_json(doc);
    const std::string csv = report_to_csv(report);
    if (out_csv.empty()) {
        std::cout << csv;
    } else {
        write_file(out_csv, csv);
        std::cout << "wrote " << out_csv.string() << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vchange: volumetric change detection toolkit"};
    app.require_subcommand(1);

    fs::path validate_manifest;
    auto* validate_cmd = app.add_subcommand("validate", "Check a dataset manifest's invariants");
    validate_cmd->add_option("manifest", validate_manifest, "Manifest JSON path")->required();

    SamplePairsArgs sp;
    auto* sample_cmd =
        app.add_subcommand("sample-pairs", "List labeled pairs and sample unlabeled ones");
    sample_cmd->add_option("manifest", sp.manifest_path, "Manifest JSON path")->required();
    sample_cmd->add_option("--split", sp.split, "train|validation|test");
    sample_cmd->add_option("--max-gap", sp.max_gap, "Max pair gap in seconds (default one week)");
    sample_cmd->add_option("--labeled-fraction", sp.labeled_fraction,
                           "Labeled share of the mix (default 0.4)");
    sample_cmd->add_option("--count", sp.count,
                           "Explicit unlabeled count (overrides the mix plan)");
    sample_cmd->add_option("--seed", sp.seed, "Sampling seed");
    sample_cmd->add_flag("--include-empty", sp.include_empty,
                         "Keep labeled pairs with no polygons");
    sample_cmd->add_option("--out", sp.out, "Output JSON path (default: stdout)");

    DetectArgs da;
    auto* detect_cmd = app.add_subcommand("detect", "Run a classical detector on an image pair");
    detect_cmd->add_option("image_a", da.image_a, "First image (PNG)")->required();
    detect_cmd->add_option("image_b", da.image_b, "Second image (PNG)")->required();
    detect_cmd->add_option("--out", da.out, "Output change mask PNG")->required();
    detect_cmd->add_option("--method", da.method, "ncc|norm-diff (default ncc)");
    detect_cmd->add_option("--block", da.block, "NCC window side (default 16)");
    detect_cmd->add_option("--stride", da.stride, "NCC window step (default block/2)");
    detect_cmd->add_option("--rule", da.rule, "fixed:<t> or sigma:<k> (default sigma:2)");
    detect_cmd->add_option("--min-area", da.min_area, "Drop components below this area");
    detect_cmd->add_option("--patch", da.patch, "Patch size for patch-wise processing");
    detect_cmd->add_option("--overlap", da.overlap, "Patch overlap");

    IngestArgs ia;
    auto* ingest_cmd =
        app.add_subcommand("ingest", "Turn external model score rasters into a change mask");
    ingest_cmd->add_option("inputs", ia.inputs, "FR32 score file(s); two for --kind depth")
        ->required();
    ingest_cmd->add_option("--kind", ia.kind, "confidence|depth|activation")->required();
    ingest_cmd->add_option("--out", ia.out, "Output change mask PNG")->required();
    ingest_cmd->add_option("--rule", ia.rule, "fixed:<t> or sigma:<k> (default sigma:2)");
    ingest_cmd->add_option("--min-area", ia.min_area, "Drop components below this area");
    ingest_cmd->add_option("--width", ia.width, "Target width (default: input width)");
    ingest_cmd->add_option("--height", ia.height, "Target height (default: input height)");

    EvaluateArgs ea;
    auto* eval_cmd = app.add_subcommand("evaluate", "Score prediction masks against a manifest");
    eval_cmd->add_option("manifest", ea.manifest_path, "Manifest JSON path")->required();
    eval_cmd->add_option("predictions", ea.predictions_dir, "Predictions directory")->required();
    eval_cmd->add_option("--split", ea.split, "train|validation|test (default test)");
    eval_cmd->add_option("--iou-threshold", ea.iou_threshold,
                         "Event IoU threshold (default 0.25)");
    eval_cmd->add_option("--out", ea.out, "Report path prefix (writes .json and .csv)");
    eval_cmd->add_option("--jobs", ea.jobs, "Parallel pair evaluations");

    SynthArgs sy;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic time-lapse sequence");
    synth_cmd->add_option("--config", sy.config_path,
                          "Generator config JSON (defaults if omitted)");
    synth_cmd->add_option("--out", sy.out_dir, "Output directory")->required();
    synth_cmd->add_option("--seed", sy.seed, "Override the config seed");

    fs::path report_in, report_out;
    auto* report_cmd = app.add_subcommand("report", "Render a JSON report as CSV");
    report_cmd->add_option("report", report_in, "Report JSON path")->required();
    report_cmd->add_option("--out", report_out, "Output CSV path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (validate_cmd->parsed()) return cmd_validate(validate_manifest);
        if (sample_cmd->parsed()) return cmd_sample_pairs(sp);
        if (detect_cmd->parsed()) return cmd_detect(da);
        if (ingest_cmd->parsed()) return cmd_ingest(ia);
        if (eval_cmd->parsed()) return cmd_evaluate(ea);
        if (synth_cmd->parsed()) return cmd_synth(sy);
        if (report_cmd->parsed()) return cmd_report(report_in, report_out);
        std::cerr << "error: no subcommand\n";
        return kExitUsage;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}
