#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "vchange/errors.hpp"
#include "vchange/tiling.hpp"

using namespace vchange;
using test_util::Rng;

namespace {

// Independent count of stride-stepped positions with a clamped final one.
long long expected_axis_count(long long size, long long patch, long long stride) {
    if (size <= patch) return 1;
    return 1 + static_cast<long long>(
                   std::ceil(static_cast<double>(size - patch) / static_cast<double>(stride)));
}

void check_full_coverage(const PatchGrid& grid) {
    std::vector<uint8_t> covered(static_cast<size_t>(grid.image_w) * grid.image_h, 0);
    for (const PatchRect& r : grid.rects) {
        REQUIRE(r.width() >= 1);
        REQUIRE(r.height() >= 1);
        REQUIRE(r.width() <= grid.patch);
        REQUIRE(r.height() <= grid.patch);
        for (int y = r.y0; y < r.y1; ++y)
            for (int x = r.x0; x < r.x1; ++x)
                covered[static_cast<size_t>(y) * grid.image_w + x] = 1;
    }
    for (uint8_t c : covered) REQUIRE(c == 1);
}

}  // namespace

TEST_SUITE("tiling") {

TEST_CASE("plan_grid exact division") {
    const PatchGrid grid = plan_grid(2048, 1024, 1024, 0);
    CHECK(grid.rects.size() == 2);
    CHECK(grid.rects[0] == PatchRect{0, 0, 1024, 1024});
    CHECK(grid.rects[1] == PatchRect{1024, 0, 2048, 1024});
}

TEST_CASE("plan_grid clamps when the patch exceeds the image") {
    const PatchGrid grid = plan_grid(1000, 1000, 1024, 0);
    REQUIRE(grid.rects.size() == 1);
    CHECK(grid.rects[0] == PatchRect{0, 0, 1000, 1000});
}

TEST_CASE("plan_grid covers the full-scene resolution with overlap") {
    const PatchGrid grid = plan_grid(3850, 1900, 1024, 64);
    check_full_coverage(grid);
    const long long expected =
        expected_axis_count(3850, 1024, 960) * expected_axis_count(1900, 1024, 960);
    CHECK(static_cast<long long>(grid.rects.size()) == expected);
}

TEST_CASE("plan_grid rejects overlap >= patch") {
    CHECK_THROWS_AS(plan_grid(100, 100, 16, 16), UsageError);
    CHECK_THROWS_AS(plan_grid(100, 100, 16, 17), UsageError);
}

TEST_CASE("plan_grid coverage property over random shapes") {
    Rng rng(21);
    for (int t = 0; t < 50; ++t) {
        const int w = 1 + static_cast<int>(rng.bounded(300));
        const int h = 1 + static_cast<int>(rng.bounded(300));
        const int patch = 1 + static_cast<int>(rng.bounded(64));
        const int overlap = static_cast<int>(rng.bounded(static_cast<uint64_t>(patch)));
        const PatchGrid grid = plan_grid(w, h, patch, overlap);
        check_full_coverage(grid);
        CHECK(static_cast<long long>(grid.rects.size()) ==
              expected_axis_count(w, patch, patch - overlap) *
                  expected_axis_count(h, patch, patch - overlap));
    }
}

TEST_CASE("tile then stitch is the identity") {
    Rng rng(22);
    SUBCASE("no overlap: bit-exact") {
        const FloatRaster r = test_util::random_raster(97, 53, -4, 4, rng);
        const PatchGrid grid = plan_grid(r.width, r.height, 32, 0);
        CHECK(stitch_float(grid, extract_patches(r, grid)).bit_equal(r));
    }
    SUBCASE("with overlap: within 1e-6") {
        const FloatRaster r = test_util::random_raster(129, 77, -4, 4, rng);
        const PatchGrid grid = plan_grid(r.width, r.height, 48, 16);
        const FloatRaster back = stitch_float(grid, extract_patches(r, grid));
        for (size_t i = 0; i < r.values.size(); ++i)
            CHECK(std::fabs(back.values[i] - r.values[i]) < 1e-6);
    }
}

TEST_CASE("stitch_float averages half-overlapping patches") {
    // Two 2-wide patches over a 3x1 image, overlapping in the middle pixel.
    const PatchGrid grid = plan_grid(3, 1, 2, 1);
    REQUIRE(grid.rects.size() == 2);
    const std::vector<FloatRaster> patches{FloatRaster(2, 1, 0.0f), FloatRaster(2, 1, 1.0f)};
    const FloatRaster out = stitch_float(grid, patches);
    CHECK(out.at(0, 0) == 0.0f);
    CHECK(out.at(1, 0) == 0.5f);
    CHECK(out.at(2, 0) == 1.0f);
}

TEST_CASE("stitch errors on mismatched patches") {
    const PatchGrid grid = plan_grid(10, 10, 4, 0);
    std::vector<FloatRaster> wrong_count{FloatRaster(4, 4)};
    CHECK_THROWS_AS(stitch_float(grid, wrong_count), ValidationError);
    std::vector<FloatRaster> wrong_dims(grid.rects.size(), FloatRaster(3, 3));
    CHECK_THROWS_AS(stitch_float(grid, wrong_dims), ValidationError);
}

TEST_CASE("stitch_binary ORs covering patches") {
    const PatchGrid grid = plan_grid(3, 1, 2, 1);
    SUBCASE("all empty stays empty") {
        const std::vector<BinaryMask> patches{BinaryMask(2, 1), BinaryMask(2, 1)};
        CHECK(stitch_binary(grid, patches).count() == 0);
    }
    SUBCASE("single set pixel lands where it came from") {
        std::vector<BinaryMask> patches{BinaryMask(2, 1), BinaryMask(2, 1)};
        patches[0].set(0, 0, true);
        const BinaryMask out = stitch_binary(grid, patches);
        CHECK(out.get(0, 0));
        CHECK(out.count() == 1);
    }
    SUBCASE("set OR unset in the overlap is set") {
        std::vector<BinaryMask> patches{BinaryMask(2, 1), BinaryMask(2, 1)};
        patches[0].set(1, 0, true);  // covers image pixel 1; patch 1 leaves it unset
        const BinaryMask out = stitch_binary(grid, patches);
        CHECK(out.get(1, 0));
    }
}

TEST_CASE("stitch_binary is monotone in its inputs") {
    Rng rng(23);
    const BinaryMask base = test_util::random_mask(40, 30, 0.2, rng);
    const PatchGrid grid = plan_grid(40, 30, 16, 4);
    auto patches = extract_patches(base, grid);
    const BinaryMask before = stitch_binary(grid, patches);
    // Set one more pixel in a random patch; no output pixel may turn off.
    for (int t = 0; t < 10; ++t) {
        const size_t pi = rng.bounded(patches.size());
        const int px = static_cast<int>(rng.bounded(static_cast<uint64_t>(patches[pi].width)));
        const int py = static_cast<int>(rng.bounded(static_cast<uint64_t>(patches[pi].height)));
        patches[pi].set(px, py, true);
    }
    const BinaryMask after = stitch_binary(grid, patches);
    for (size_t i = 0; i < before.bits.size(); ++i)
        if (before.bits[i]) CHECK(after.bits[i]);
}

}  // TEST_SUITE
