#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "vchange/changemap.hpp"
#include "vchange/errors.hpp"

using namespace vchange;
using test_util::Rng;

TEST_SUITE("changemap") {

TEST_CASE("threshold rule parsing") {
    const ThresholdRule f = ThresholdRule::parse("fixed:0.5");
    CHECK(f.kind == ThresholdRule::Kind::fixed);
    CHECK(f.value == 0.5);
    const ThresholdRule s = ThresholdRule::parse("sigma:2");
    CHECK(s.kind == ThresholdRule::Kind::mean_plus_k_sigma);
    CHECK(s.value == 2.0);
    CHECK_THROWS_AS(ThresholdRule::parse("nope:1"), UsageError);
    CHECK_THROWS_AS(ThresholdRule::parse("fixed:abc"), UsageError);
    CHECK_THROWS_AS(ThresholdRule::mean_plus_k_sigma(-1), UsageError);
}

TEST_CASE("complement_confidence basics") {
    const FloatRaster ones(4, 4, 1.0f);
    for (float v : complement_confidence(ones).values) CHECK(v == 0.0f);
    const FloatRaster zeros(4, 4, 0.0f);
    for (float v : complement_confidence(zeros).values) CHECK(v == 1.0f);

    const FloatRaster pair = FloatRaster::from_values(2, 1, {0.2f, 0.9f});
    const FloatRaster out = complement_confidence(pair);
    CHECK(out.at(0, 0) == doctest::Approx(0.8).epsilon(1e-6));
    CHECK(out.at(1, 0) == doctest::Approx(0.1).epsilon(1e-6));
}

TEST_CASE("complement_confidence clamps out-of-range inputs") {
    const FloatRaster wild = FloatRaster::from_values(2, 1, {-0.5f, 1.5f});
    const FloatRaster out = complement_confidence(wild);
    CHECK(out.at(0, 0) == 1.0f);
    CHECK(out.at(1, 0) == 0.0f);
}

TEST_CASE("complement_confidence is an involution on [0,1]") {
    Rng rng(31);
    const FloatRaster r = test_util::random_raster(16, 16, 0.0, 1.0, rng);
    const FloatRaster twice = complement_confidence(complement_confidence(r));
    for (size_t i = 0; i < r.values.size(); ++i)
        CHECK(std::fabs(twice.values[i] - r.values[i]) <= 1.2e-7);
}

TEST_CASE("abs_difference basics and symmetry") {
    const FloatRaster a(3, 3, 3.0f);
    const FloatRaster b(3, 3, 5.0f);
    for (float v : abs_difference(a, a).values) CHECK(v == 0.0f);
    for (float v : abs_difference(a, b).values) CHECK(v == 2.0f);
    CHECK_THROWS_AS(abs_difference(a, FloatRaster(2, 3)), ValidationError);

    Rng rng(32);
    const FloatRaster x = test_util::random_raster(9, 7, -10, 10, rng);
    const FloatRaster y = test_util::random_raster(9, 7, -10, 10, rng);
    CHECK(abs_difference(x, y).bit_equal(abs_difference(y, x)));
}

TEST_CASE("threshold mean+k*sigma on a constant raster is empty") {
    const FloatRaster c(8, 8, 0.37f);
    CHECK(threshold(c, ThresholdRule::mean_plus_k_sigma(2)).count() == 0);
}

TEST_CASE("threshold mean+2sigma on {0,0,0,0,10}") {
    const FloatRaster r = FloatRaster::from_values(5, 1, {0, 0, 0, 0, 10});
    // Scalar statistics oracle: mu = 2, population sigma = 4, cut = 10.
    double mean = 0;
    for (float v : r.values) mean += v;
    mean /= 5.0;
    double var = 0;
    for (float v : r.values) var += (v - mean) * (v - mean);
    var /= 5.0;
    CHECK(mean == doctest::Approx(2.0));
    CHECK(std::sqrt(var) == doctest::Approx(4.0));
    // Strict '>' means even the 10 does not pass its own cut.
    CHECK(threshold(r, ThresholdRule::mean_plus_k_sigma(2)).count() == 0);
}

TEST_CASE("threshold fixed is strict") {
    const FloatRaster r = FloatRaster::from_values(2, 1, {0.0f, 1.0f});
    const BinaryMask m = threshold(r, ThresholdRule::fixed(0.5));
    CHECK_FALSE(m.get(0, 0));
    CHECK(m.get(1, 0));
    // Equality does not pass.
    const FloatRaster eq(2, 1, 0.5f);
    CHECK(threshold(eq, ThresholdRule::fixed(0.5)).count() == 0);
}

TEST_CASE("fixed-rule monotonicity") {
    Rng rng(33);
    for (int t = 0; t < 30; ++t) {
        const FloatRaster r = test_util::random_raster(12, 12, -1, 2, rng);
        const double t1 = rng.uniform(-1, 2);
        const double t2 = t1 + rng.uniform(0, 1);
        const BinaryMask hi = threshold(r, ThresholdRule::fixed(t2));
        const BinaryMask lo = threshold(r, ThresholdRule::fixed(t1));
        for (size_t i = 0; i < hi.bits.size(); ++i)
            if (hi.bits[i]) CHECK(lo.bits[i]);
    }
}

TEST_CASE("mean+k*sigma threshold is shift invariant") {
    Rng rng(34);
    for (int t = 0; t < 20; ++t) {
        FloatRaster r(10, 10);
        for (auto& v : r.values) v = static_cast<float>(rng.bounded(21));  // small ints: exact
        const double shift = static_cast<double>(1 + rng.bounded(100));
        FloatRaster shifted(10, 10);
        for (size_t i = 0; i < r.values.size(); ++i)
            shifted.values[i] = static_cast<float>(r.values[i] + shift);
        const BinaryMask a = threshold(r, ThresholdRule::mean_plus_k_sigma(2));
        const BinaryMask b = threshold(shifted, ThresholdRule::mean_plus_k_sigma(2));
        CHECK(a == b);
    }
}

TEST_CASE("min_area_filter basics") {
    Rng rng(35);
    const BinaryMask m = test_util::random_blocks_mask(32, 32, 6, 6, rng);
    CHECK(min_area_filter(m, 0) == m);

    BinaryMask three(8, 8);
    three.set(1, 1, true);
    three.set(2, 1, true);
    three.set(2, 2, true);
    CHECK(min_area_filter(three, 4).count() == 0);
    CHECK(min_area_filter(three, 3) == three);
}

TEST_CASE("min_area_filter agrees with the flood-fill reference") {
    Rng rng(36);
    for (int t = 0; t < 15; ++t) {
        const BinaryMask m = test_util::random_mask(48, 48, 0.3, rng);
        const long long min_area = 1 + static_cast<long long>(rng.bounded(12));
        const BinaryMask filtered = min_area_filter(m, min_area);
        BinaryMask expected(48, 48);
        for (const auto& comp : test_util::reference_components(m))
            if (static_cast<long long>(comp.size()) >= min_area)
                for (const auto& [x, y] : comp) expected.set(x, y, true);
        CHECK(filtered == expected);
    }
}

TEST_CASE("min_area_filter is idempotent") {
    Rng rng(37);
    const BinaryMask m = test_util::random_mask(40, 40, 0.35, rng);
    const BinaryMask once = min_area_filter(m, 5);
    CHECK(min_area_filter(once, 5) == once);
}

TEST_CASE("derive_change_map trivial inputs") {
    const FloatRaster conf(16, 16, 1.0f);
    CHECK(derive_change_map(ConfidenceInput{conf}, ThresholdRule::mean_plus_k_sigma(2), 0, 64, 64)
              .count() == 0);
    const FloatRaster depth(16, 16, 7.0f);
    CHECK(derive_change_map(DepthPairInput{depth, depth}, ThresholdRule::mean_plus_k_sigma(2), 0,
                            16, 16)
              .count() == 0);
}

TEST_CASE("derive_change_map equals the manual stage composition") {
    // Coarse 64x64 confidence with one 8x8 zero-confidence block.
    FloatRaster conf(64, 64, 1.0f);
    for (int y = 24; y < 32; ++y)
        for (int x = 40; x < 48; ++x) conf.at(x, y) = 0.0f;

    const ThresholdRule rule = ThresholdRule::fixed(0.5);
    const BinaryMask derived = derive_change_map(ConfidenceInput{conf}, rule, 0, 512, 512);
    const BinaryMask manual =
        min_area_filter(threshold(upsample_bilinear(complement_confidence(conf), 512, 512), rule), 0);
    CHECK(derived == manual);

    // One component covering roughly the scaled block.
    const auto labeling = connected_components(derived);
    REQUIRE(labeling.components.size() == 1);
    const Component& c = labeling.components[0];
    const double sx = 511.0 / 63.0;
    CHECK(c.x0 > 40 * sx - 2 * sx);
    CHECK(c.x1 < 48 * sx + 2 * sx);
    CHECK(c.y0 > 24 * sx - 2 * sx);
    CHECK(c.y1 < 32 * sx + 2 * sx);
    CHECK(c.pixel_count > 8 * 8);
}

TEST_CASE("derive_change_map activation path keeps the score untouched") {
    Rng rng(38);
    const FloatRaster act = test_util::random_raster(10, 10, -3, 3, rng);
    const BinaryMask mask =
        derive_change_map(ActivationInput{act}, ThresholdRule::mean_plus_k_sigma(2), 0, 10, 10);
    CHECK(mask == threshold(act, ThresholdRule::mean_plus_k_sigma(2)));
}

}  // TEST_SUITE
