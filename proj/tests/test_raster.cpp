#include <doctest.h>

#include <map>

#include "test_util.hpp"
#include "vchange/errors.hpp"
#include "vchange/raster.hpp"
#include "vchange/raster_io.hpp"

using namespace vchange;
using test_util::Rng;

TEST_SUITE("raster") {

TEST_CASE("rasterize axis-aligned square") {
    PolygonAnnotation square{{{0, 0}, {4, 0}, {4, 4}, {0, 4}}};
    const BinaryMask m = rasterize_polygon(square, 8, 8);
    CHECK(m.count() == 16);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) CHECK(m.get(x, y) == (x < 4 && y < 4));
}

TEST_CASE("rasterize triangle matches per-pixel reference exactly") {
    PolygonAnnotation tri{{{0, 0}, {8, 0}, {0, 8}}};
    const BinaryMask m = rasterize_polygon(tri, 8, 8);
    const BinaryMask ref = test_util::reference_rasterize(tri, 8, 8);
    CHECK(m == ref);
    CHECK(m.count() == ref.count());
    CHECK(m.count() > 0);
}

TEST_CASE("rasterize random polygons match the reference") {
    Rng rng(11);
    for (int t = 0; t < 60; ++t) {
        const auto poly = test_util::random_polygon(rng.uniform(4, 28), rng.uniform(4, 28),
                                                    rng.uniform(2, 10), rng);
        const BinaryMask m = rasterize_polygon(poly, 32, 32);
        const BinaryMask ref = test_util::reference_rasterize(poly, 32, 32);
        CHECK(m == ref);
    }
}

TEST_CASE("rasterize clips polygons that leave the raster") {
    PolygonAnnotation poly{{{-10, -10}, {-2, -10}, {-2, -2}, {-10, -2}}};
    CHECK(rasterize_polygon(poly, 8, 8).count() == 0);

    PolygonAnnotation straddling{{{-4, 1}, {4, 1}, {4, 5}, {-4, 5}}};
    const BinaryMask m = rasterize_polygon(straddling, 8, 8);
    const BinaryMask ref = test_util::reference_rasterize(straddling, 8, 8);
    CHECK(m == ref);
    CHECK(m.count() == 4 * 4);  // clipped half
}

TEST_CASE("rasterize degenerate polygon yields empty mask") {
    PolygonAnnotation two{{{1, 1}, {5, 5}}};
    CHECK(rasterize_polygon(two, 8, 8).count() == 0);
    PolygonAnnotation sliver{{{1.1, 1.1}, {1.2, 1.1}, {1.15, 1.12}}};
    CHECK(rasterize_polygon(sliver, 8, 8).count() == 0);
}

TEST_CASE("rasterize translation consistency on the quarter grid") {
    Rng rng(12);
    for (int t = 0; t < 30; ++t) {
        const auto poly =
            test_util::random_polygon(rng.uniform(10, 20), rng.uniform(10, 20), 6.0, rng);
        const int dx = static_cast<int>(rng.bounded(20));
        const int dy = static_cast<int>(rng.bounded(20));
        const BinaryMask base = rasterize_polygon(poly, 64, 64);
        const BinaryMask shifted = rasterize_polygon(translate(poly, dx, dy), 64, 64);
        REQUIRE(base.count() == shifted.count());
        for (int y = 0; y < 64; ++y)
            for (int x = 0; x < 64; ++x)
                if (base.get(x, y)) CHECK(shifted.get(x + dx, y + dy));
    }
}

TEST_CASE("connected components on empty and diagonal masks") {
    BinaryMask empty(8, 8);
    CHECK(connected_components(empty).components.empty());

    BinaryMask diag(8, 8);
    diag.set(2, 2, true);
    diag.set(3, 3, true);
    const auto labeling = connected_components(diag);
    REQUIRE(labeling.components.size() == 1);
    CHECK(labeling.components[0].pixel_count == 2);
    CHECK(labeling.components[0].x0 == 2);
    CHECK(labeling.components[0].y0 == 2);
    CHECK(labeling.components[0].x1 == 4);
    CHECK(labeling.components[0].y1 == 4);
}

TEST_CASE("connected components partition matches flood-fill reference") {
    Rng rng(13);
    for (int t = 0; t < 25; ++t) {
        const BinaryMask m = t % 2 == 0 ? test_util::random_mask(64, 64, 0.35, rng)
                                        : test_util::random_blocks_mask(64, 64, 8, 12, rng);
        const auto labeling = connected_components(m);
        const auto ref = test_util::reference_components(m);
        REQUIRE(labeling.components.size() == ref.size());

        // Same partition: every reference component maps to exactly one label
        // and label pixel counts agree.
        long long total = 0;
        std::map<int32_t, long long> counts;
        for (const auto& comp : ref) {
            const int32_t label = labeling.label_at(comp.begin()->first, comp.begin()->second);
            REQUIRE(label != 0);
            for (const auto& [x, y] : comp) CHECK(labeling.label_at(x, y) == label);
            counts[label] += static_cast<long long>(comp.size());
            total += static_cast<long long>(comp.size());
        }
        CHECK(total == m.count());
        for (const Component& c : labeling.components) {
            CHECK(counts[c.label] == c.pixel_count);
            CHECK(c.x0 >= 0);
            CHECK(c.x1 <= m.width);
        }
        // Ascending (y0, x0) ordering.
        for (size_t i = 1; i < labeling.components.size(); ++i) {
            const Component& a = labeling.components[i - 1];
            const Component& b = labeling.components[i];
            CHECK((a.y0 < b.y0 || (a.y0 == b.y0 && a.x0 <= b.x0)));
        }
    }
}

TEST_CASE("upsample constants and the 2x2 checker") {
    const FloatRaster c(7, 3, 0.7f);
    const FloatRaster up = upsample_bilinear(c, 31, 17);
    for (float v : up.values) CHECK(v == 0.7f);

    const FloatRaster one(1, 1, 0.42f);
    const FloatRaster five = upsample_bilinear(one, 5, 5);
    for (float v : five.values) CHECK(v == 0.42f);

    const FloatRaster checker = FloatRaster::from_values(2, 2, {0.0f, 1.0f, 1.0f, 0.0f});
    const FloatRaster three = upsample_bilinear(checker, 3, 3);
    CHECK(three.at(1, 1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(three.at(0, 0) == 0.0f);
    CHECK(three.at(2, 2) == 0.0f);
    CHECK(three.at(1, 0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("upsample same size is the bit-exact identity") {
    Rng rng(14);
    for (int t = 0; t < 20; ++t) {
        const int w = 1 + static_cast<int>(rng.bounded(17));
        const int h = 1 + static_cast<int>(rng.bounded(17));
        const FloatRaster r = test_util::random_raster(w, h, -5, 5, rng);
        CHECK(upsample_bilinear(r, w, h).bit_equal(r));
    }
}

TEST_CASE("upsample output stays within the input range") {
    Rng rng(15);
    for (int t = 0; t < 20; ++t) {
        const FloatRaster r = test_util::random_raster(3 + static_cast<int>(rng.bounded(6)),
                                                       3 + static_cast<int>(rng.bounded(6)),
                                                       -10, 10, rng);
        const FloatRaster up = upsample_bilinear(r, 37, 23);
        CHECK(up.min_value() >= r.min_value());
        CHECK(up.max_value() <= r.max_value());
    }
}

TEST_CASE("FloatRaster rejects NaN at construction") {
    CHECK_THROWS_AS(FloatRaster::from_values(1, 2, {1.0f, std::nanf("")}), ValidationError);
    CHECK_THROWS_AS(FloatRaster(2, 2, std::nanf("")), ValidationError);
}

TEST_CASE("FR32 round trip is bit-exact") {
    const FloatRaster r =
        FloatRaster::from_values(3, 2, {0.0f, -0.0f, 1.5f, -3.25e-7f, 1e30f, -42.0f});
    const auto bytes = encode_fr32(r);
    const FloatRaster back = decode_fr32(bytes);
    CHECK(back.bit_equal(r));
    CHECK(bytes.size() == 12 + 6 * 4);
}

TEST_CASE("FR32 rejects truncation, bad magic, and dimension overflow") {
    const FloatRaster r(4, 4, 1.0f);
    auto bytes = encode_fr32(r);
    auto truncated = bytes;
    truncated.pop_back();
    CHECK_THROWS_AS(decode_fr32(truncated), IoError);

    auto bad = bytes;
    bad[0] = 'X';
    CHECK_THROWS_AS(decode_fr32(bad), IoError);

    auto huge = bytes;
    huge[4] = huge[5] = huge[6] = huge[7] = 0xff;  // absurd width
    CHECK_THROWS_AS(decode_fr32(huge), IoError);
}

TEST_CASE("mask PNG round trip is exact") {
    Rng rng(16);
    const BinaryMask m = test_util::random_mask(13, 9, 0.4, rng);
    CHECK(decode_mask_png(encode_mask_png(m)) == m);
}

TEST_CASE("decode_raster sniffs both formats") {
    const FloatRaster r(2, 2, 3.5f);
    const auto fr = decode_raster(encode_fr32(r));
    REQUIRE(std::holds_alternative<FloatRaster>(fr));
    CHECK(std::get<FloatRaster>(fr).bit_equal(r));

    BinaryMask m(2, 2);
    m.set(1, 0, true);
    const auto pm = decode_raster(encode_mask_png(m));
    REQUIRE(std::holds_alternative<BinaryMask>(pm));
    CHECK(std::get<BinaryMask>(pm) == m);

    CHECK_THROWS_AS(decode_raster({1, 2, 3, 4, 5, 6, 7, 8, 9}), IoError);
}

TEST_CASE("raster round trip holds over many random rasters") {
    Rng rng(17);
    for (int t = 0; t < 10000; ++t) {
        const int w = 1 + static_cast<int>(rng.bounded(8));
        const int h = 1 + static_cast<int>(rng.bounded(8));
        const FloatRaster r = test_util::random_raster(w, h, -1e6, 1e6, rng);
        if (!decode_fr32(encode_fr32(r)).bit_equal(r)) {
            FAIL("FR32 round trip mismatch at iteration ", t);
        }
    }
    for (int t = 0; t < 1000; ++t) {
        const int w = 1 + static_cast<int>(rng.bounded(16));
        const int h = 1 + static_cast<int>(rng.bounded(16));
        const BinaryMask m = test_util::random_mask(w, h, rng.next_double(), rng);
        if (!(decode_mask_png(encode_mask_png(m)) == m)) {
            FAIL("mask PNG round trip mismatch at iteration ", t);
        }
    }
}

}  // TEST_SUITE
