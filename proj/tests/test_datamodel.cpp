#include <doctest.h>

#include <set>

#include "test_util.hpp"
#include "vchange/datamodel.hpp"
#include "vchange/errors.hpp"

using namespace vchange;

namespace {

const char* kMinimalDoc = R"({
  "schema_version": 1,
  "sites": [
    {
      "name": "solo",
      "split": "train",
      "width": 64,
      "height": 48,
      "frames": [
        {"index": 0, "timestamp": "2024-05-01T06:00:00Z", "image_path": "solo/0.png"}
      ],
      "annotated_pairs": []
    }
  ]
})";

// Three sites across splits, hourly frames, a few annotated pairs.
std::string rich_doc() {
    return R"({
  "schema_version": 1,
  "sites": [
    {
      "name": "Grands Mulets terminus",
      "split": "validation",
      "width": 2500, "height": 1200,
      "frames": [
        {"index": 0, "timestamp": "2024-05-01T06:00:00Z", "image_path": "gm/0.png"},
        {"index": 1, "timestamp": "2024-05-01T07:00:00Z", "image_path": "gm/1.png"}
      ],
      "annotated_pairs": [
        {"frame_a": 0, "frame_b": 1, "polygons": [[[10,10],[40,12],[35,44],[8,30]]]}
      ]
    },
    {
      "name": "alpha",
      "split": "train",
      "width": 100, "height": 80,
      "frames": [
        {"index": 0, "timestamp": 0, "image_path": "a/0.png"},
        {"index": 1, "timestamp": 3600, "image_path": "a/1.png"},
        {"index": 2, "timestamp": 7200, "image_path": "a/2.png"},
        {"index": 3, "timestamp": 500000, "image_path": "a/3.png"}
      ],
      "annotated_pairs": [
        {"frame_a": 0, "frame_b": 1, "polygons": [[[1,1],[9,1],[9,9],[1,9]]]},
        {"frame_a": 1, "frame_b": 2, "polygons": []},
        {"frame_a": 0, "frame_b": 2, "polygons": [[[20,20],[30,20],[25,30]]]}
      ]
    },
    {
      "name": "beta",
      "split": "train",
      "width": 50, "height": 50,
      "frames": [
        {"index": 0, "timestamp": 100, "image_path": "b/0.png"},
        {"index": 1, "timestamp": 200, "image_path": "b/1.png"},
        {"index": 2, "timestamp": 2000000, "image_path": "b/2.png"}
      ],
      "annotated_pairs": [
        {"frame_a": 0, "frame_b": 1, "polygons": [[[2,2],[8,2],[8,8],[2,8]]]}
      ]
    }
  ]
})";
}

}  // namespace

TEST_SUITE("datamodel") {

TEST_CASE("parse minimal manifest") {
    const Manifest m = parse_manifest(kMinimalDoc);
    REQUIRE(m.sites.size() == 1);
    CHECK(m.sites[0].name == "solo");
    CHECK(m.sites[0].frames.size() == 1);
    CHECK(m.sites[0].annotated_pairs.empty());
    CHECK(validate(m).empty());
}

TEST_CASE("split assignment comes from the document") {
    const Manifest m = parse_manifest(rich_doc());
    CHECK(m.sites[0].name == "Grands Mulets terminus");
    CHECK(m.sites[0].split == Split::validation);
}

TEST_CASE("duplicate site names are a parse error") {
    const std::string doc = R"({"schema_version":1,"sites":[
      {"name":"A","split":"train","width":8,"height":8,"frames":[]},
      {"name":"A","split":"test","width":8,"height":8,"frames":[]}]})";
    CHECK_THROWS_AS(parse_manifest(doc), ValidationError);
}

TEST_CASE("malformed documents and unknown schema versions fail") {
    CHECK_THROWS_AS(parse_manifest("this is not json"), ValidationError);
    CHECK_THROWS_AS(parse_manifest("{\"schema_version\":99,\"sites\":[]}"), ValidationError);
    CHECK_THROWS_AS(parse_manifest("{\"sites\":[]}"), ValidationError);
    CHECK_THROWS_AS(parse_manifest("[1,2,3]"), ValidationError);
}

TEST_CASE("serialize-parse is a fixed point") {
    const Manifest m1 = parse_manifest(rich_doc());
    const std::string s1 = serialize_manifest(m1);
    const Manifest m2 = parse_manifest(s1);
    const std::string s2 = serialize_manifest(m2);
    CHECK(s1 == s2);
    REQUIRE(m2.sites.size() == m1.sites.size());
    for (size_t i = 0; i < m1.sites.size(); ++i) {
        CHECK(m2.sites[i].name == m1.sites[i].name);
        CHECK(m2.sites[i].split == m1.sites[i].split);
        REQUIRE(m2.sites[i].frames.size() == m1.sites[i].frames.size());
        for (size_t f = 0; f < m1.sites[i].frames.size(); ++f)
            CHECK(m2.sites[i].frames[f].timestamp == m1.sites[i].frames[f].timestamp);
        CHECK(m2.sites[i].annotated_pairs.size() == m1.sites[i].annotated_pairs.size());
    }
}

TEST_CASE("iso-8601 timestamps round trip") {
    CHECK(parse_iso8601_utc("1970-01-01T00:00:00Z") == 0);
    CHECK(parse_iso8601_utc("2024-05-01T06:00:00Z") == 1714543200);  // known epoch value
    CHECK(format_iso8601_utc(1714543200) == "2024-05-01T06:00:00Z");
    CHECK(format_iso8601_utc(0) == "1970-01-01T00:00:00Z");
    CHECK_THROWS_AS(parse_iso8601_utc("2024-05-01 06:00:00"), ValidationError);
    CHECK_THROWS_AS(parse_iso8601_utc("2024-13-01T00:00:00Z"), ValidationError);
}

TEST_CASE("validate reports dangling references and out-of-bounds polygons") {
    Manifest m = parse_manifest(rich_doc());
    m.sites[1].annotated_pairs.push_back(AnnotatedPair{2, 99, {}});
    m.sites[1].annotated_pairs.push_back(
        AnnotatedPair{0, 1, {PolygonAnnotation{{{-3, 5}, {10, 5}, {10, 15}, {-3, 15}}}}});
    const ValidationReport report = validate(m);
    std::set<std::string> kinds;
    for (const Violation& v : report) kinds.insert(v.kind);
    CHECK(kinds.count("dangling_reference") == 1);
    CHECK(kinds.count("out_of_bounds") == 1);
}

TEST_CASE("validate reports split-exclusivity and ordering breaks") {
    Manifest m = parse_manifest(kMinimalDoc);
    m.sites.push_back(m.sites[0]);  // same name, programmatically constructed
    m.sites[1].split = Split::test;
    {
        bool found = false;
        for (const Violation& v : validate(m)) found = found || v.kind == "duplicate_site";
        CHECK(found);
    }

    Manifest t = parse_manifest(kMinimalDoc);
    t.sites[0].frames.push_back(Frame{1, 0, "solo/1.png"});  // timestamp not increasing
    bool found = false;
    for (const Violation& v : validate(t)) found = found || v.kind == "timestamp_order";
    CHECK(found);
}

TEST_CASE("labeled_pairs respects split, order, and changes_only") {
    const Manifest m = parse_manifest(rich_doc());
    const auto train = labeled_pairs(m, Split::train);
    REQUIRE(train.size() == 4);
    CHECK(train[0].pair.site == "alpha");
    CHECK(train[0].pair.frame_a == 0);
    CHECK(train[0].pair.frame_b == 1);
    CHECK(train[1].pair.frame_b == 2);  // (alpha, 0, 2) before (alpha, 1, 2)
    CHECK(train[3].pair.site == "beta");

    const auto changed = labeled_pairs(m, Split::train, true);
    CHECK(changed.size() == 3);  // the explicit no-change pair is dropped

    const auto val = labeled_pairs(m, Split::validation);
    REQUIRE(val.size() == 1);
    CHECK(val[0].pair.site == "Grands Mulets terminus");
    CHECK(val[0].pair.gap_seconds == 3600);
}

TEST_CASE("sample_unlabeled_pairs honors the gap cap and exclusions") {
    const Manifest m = parse_manifest(rich_doc());
    const int64_t week = 604800;
    const auto sample = sample_unlabeled_pairs(m, Split::train, week, 100, 7);
    CHECK(!sample.empty());
    std::set<std::tuple<std::string, int, int>> seen;
    for (const FramePair& fp : sample) {
        CHECK(fp.gap_seconds > 0);
        CHECK(fp.gap_seconds <= week);
        CHECK((fp.site == "alpha" || fp.site == "beta"));
        CHECK(seen.insert({fp.site, fp.frame_a, fp.frame_b}).second);  // no duplicates
        // Annotated pairs are excluded.
        CHECK(!(fp.site == "alpha" && fp.frame_a == 0 && fp.frame_b == 1));
        CHECK(!(fp.site == "alpha" && fp.frame_a == 1 && fp.frame_b == 2));
        CHECK(!(fp.site == "alpha" && fp.frame_a == 0 && fp.frame_b == 2));
        CHECK(!(fp.site == "beta" && fp.frame_a == 0 && fp.frame_b == 1));
    }
    // Eligible pool by hand: annotated alpha pairs (0,1), (1,2), (0,2) are
    // excluded, so only (0,3), (1,3), (2,3) remain (gaps 500000, 496400,
    // 492800, all within the week); beta's unannotated gaps are ~2e6 > week.
    REQUIRE(sample.size() == 3);
    for (const FramePair& fp : sample) {
        CHECK(fp.site == "alpha");
        CHECK(fp.frame_b == 3);
    }
}

TEST_CASE("sample_unlabeled_pairs determinism and count handling") {
    const Manifest m = parse_manifest(rich_doc());
    CHECK(sample_unlabeled_pairs(m, Split::train, 604800, 0, 1).empty());
    const auto a = sample_unlabeled_pairs(m, Split::train, 5000, 10, 42);
    const auto b = sample_unlabeled_pairs(m, Split::train, 5000, 10, 42);
    CHECK(a == b);

    // A site whose only gap exceeds the cap yields nothing.
    Manifest far = parse_manifest(kMinimalDoc);
    far.sites[0].frames.push_back(Frame{1, 1000000, "solo/1.png"});
    CHECK(sample_unlabeled_pairs(far, Split::train, 1000, 5, 3).empty());
}

TEST_CASE("mix_ratio_plan arithmetic") {
    CHECK(mix_ratio_plan(40, 0.4) == 60);
    CHECK(mix_ratio_plan(10, 1.0) == 0);
    CHECK(mix_ratio_plan(7, 0.4) == 11);  // round(7 * 1.5) = round(10.5), half away from zero
    CHECK_THROWS_AS(mix_ratio_plan(10, 0.0), UsageError);
    CHECK_THROWS_AS(mix_ratio_plan(10, -0.4), UsageError);
}

}  // TEST_SUITE
