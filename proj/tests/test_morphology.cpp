#include "glacier/morphology.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace glacier;
using namespace testutil;

TEST_CASE("diagonal neighbors split under 4-connectivity and join under 8") {
    Mask m = mask_rows({"10",
                        "01"});
    CHECK(connected_components(m, 4).regions.size() == 2);
    CHECK(connected_components(m, 8).regions.size() == 1);
}

TEST_CASE("labels count up in row-major first-encounter order") {
    Mask m = mask_rows({"1010",
                        "0000",
                        "0101"});
    RegionSet rs = connected_components(m, 4);
    REQUIRE(rs.regions.size() == 4);
    CHECK(rs.labels.at(0, 0) == 1.0f);
    CHECK(rs.labels.at(0, 2) == 2.0f);
    CHECK(rs.labels.at(2, 1) == 3.0f);
    CHECK(rs.labels.at(2, 3) == 4.0f);
    for (size_t i = 0; i < rs.regions.size(); ++i) CHECK(rs.regions[i].label == int(i) + 1);
}

TEST_CASE("region bookkeeping is consistent") {
    Mask m = mask_rows({"0110",
                        "0111",
                        "0010"});
    RegionSet rs = connected_components(m, 8);
    REQUIRE(rs.regions.size() == 1);
    const Region& reg = rs.regions[0];
    CHECK(reg.area == 6);
    CHECK(reg.min_r == 0);
    CHECK(reg.max_r == 2);
    CHECK(reg.min_c == 1);
    CHECK(reg.max_c == 3);
    // every cell of this thin region touches the outside
    CHECK(reg.border_cells.size() == 6);
    long long total = 0;
    for (const Region& r : rs.regions) total += r.area;
    long long positives = std::count(m.cells.begin(), m.cells.end(), 1.0f);
    CHECK(total == positives);
}

TEST_CASE("an interior cell is not a border cell") {
    Mask m = mask_rows({"111",
                        "111",
                        "111"});
    RegionSet rs = connected_components(m, 8);
    REQUIRE(rs.regions.size() == 1);
    CHECK(rs.regions[0].border_cells.size() == 8); // all but the center
    int32_t center = 1 * 3 + 1;
    for (int32_t i : rs.regions[0].border_cells) CHECK(i != center);
}

TEST_CASE("components treat nodata as background and keep it in the labels") {
    Mask m = mask_rows({"1.1"});
    RegionSet rs = connected_components(m, 8);
    CHECK(rs.regions.size() == 2);
    CHECK(rs.labels.is_nodata(rs.labels.at(0, 1)));
}

TEST_CASE("an empty mask yields no regions") {
    CHECK(connected_components(const_grid(4, 4, 0.0f), 8).regions.empty());
}

TEST_CASE("size filtering keeps regions at the cutoff and drops smaller ones") {
    Mask m = mask_rows({"11100",
                        "11000",
                        "00011"});
    // region A area 5, region B area 2
    Mask out = remove_small_regions(m, 5);
    CHECK(out.at(0, 0) == 1.0f);
    CHECK(out.at(2, 3) == 0.0f);
    CHECK(cells_equal(remove_small_regions(m, 0), m));
    Mask none = remove_small_regions(m, 6);
    CHECK(std::count(none.cells.begin(), none.cells.end(), 1.0f) == 0);
}

TEST_CASE("holes fill only when small and gentle") {
    Mask m = mask_rows({"11111",
                        "10101",
                        "11111"});
    SUBCASE("both holes qualify") {
        Grid slope = const_grid(5, 3, 10.0f);
        Mask out = fill_holes(m, slope, 4, 24.0f);
        CHECK(out.at(1, 1) == 1.0f);
        CHECK(out.at(1, 3) == 1.0f);
    }
    SUBCASE("steep holes stay open") {
        Grid slope = const_grid(5, 3, 10.0f);
        slope.at(1, 3) = 40.0f;
        Mask out = fill_holes(m, slope, 4, 24.0f);
        CHECK(out.at(1, 1) == 1.0f);
        CHECK(out.at(1, 3) == 0.0f);
    }
    SUBCASE("mean slope at the limit still fills") {
        Grid slope = const_grid(5, 3, 24.0f);
        Mask out = fill_holes(m, slope, 4, 24.0f);
        CHECK(out.at(1, 1) == 1.0f);
    }
}

TEST_CASE("a hole wider than the area cap stays open") {
    Mask m = mask_rows({"11111",
                        "10001",
                        "11111"});
    Grid slope = const_grid(5, 3, 5.0f);
    CHECK(cells_equal(fill_holes(m, slope, 2, 24.0f), m));
    Mask filled = fill_holes(m, slope, 3, 24.0f);
    CHECK(filled.at(1, 1) == 1.0f);
    CHECK(filled.at(1, 2) == 1.0f);
}

TEST_CASE("zero regions touching the border are not holes") {
    Mask m = mask_rows({"1110",
                        "1010",
                        "1110"});
    // the (1,1) pocket is enclosed; the right column reaches the border
    Grid slope = const_grid(4, 3, 5.0f);
    Mask out = fill_holes(m, slope, 10, 24.0f);
    CHECK(out.at(1, 1) == 1.0f);
    CHECK(out.at(0, 3) == 0.0f);
    CHECK(out.at(1, 3) == 0.0f);
}

TEST_CASE("diagonal gaps are not connected escapes for holes") {
    // the center zero only touches other zeros diagonally; 4-connectivity
    // makes it a one-cell hole
    Mask m = mask_rows({"1101",
                        "1011",
                        "1101"});
    Grid slope = const_grid(4, 3, 5.0f);
    Mask out = fill_holes(m, slope, 1, 24.0f);
    CHECK(out.at(1, 1) == 1.0f);
}

TEST_CASE("disk offsets grow like a rounded disk") {
    CHECK(disk_offsets(0).size() == 1);
    CHECK(disk_offsets(1).size() == 9);
    CHECK(disk_offsets(2).size() == 21);
    for (auto [dr, dc] : disk_offsets(2)) CHECK(dr * dr + dc * dc <= 6);
}

TEST_CASE("closing bridges a one-cell gap") {
    Mask m = mask_rows({"110011"});
    Mask out = close(m, 1);
    for (int c = 0; c < 6; ++c) CHECK(out.at(0, c) == 1.0f);
}

TEST_CASE("closing is extensive and idempotent") {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 40; ++trial) {
        Mask m = random_mask(rng, 24);
        for (int radius : {1, 2, 3}) {
            Mask once = close(m, radius);
            for (size_t i = 0; i < m.cells.size(); ++i)
                if (m.cells[i] == 1.0f) CHECK(once.cells[i] == 1.0f);
            Mask twice = close(once, radius);
            CHECK(cells_equal(once, twice));
        }
    }
}

TEST_CASE("closing at radius zero is the identity") {
    std::mt19937 rng(37);
    Mask m = random_mask(rng, 16);
    CHECK(cells_equal(close(m, 0), m));
}

TEST_CASE("a positive corner survives closing") {
    Mask m = mask_rows({"100",
                        "000",
                        "000"});
    Mask out = close(m, 2);
    CHECK(out.at(0, 0) == 1.0f);
}

TEST_CASE("a ring is the collar just outside the region") {
    Mask m = mask_rows({"000",
                        "010",
                        "000"});
    Mask out = ring(m, 1);
    CHECK(out.at(1, 1) == 0.0f);
    int count = 0;
    for (float v : out.cells) count += v == 1.0f;
    CHECK(count == 8);
}

TEST_CASE("rings of full or empty masks are empty") {
    Mask full = const_grid(4, 4, 1.0f);
    for (float v : ring(full, 2).cells) CHECK(v == 0.0f);
    Mask empty = const_grid(4, 4, 0.0f);
    for (float v : ring(empty, 2).cells) CHECK(v == 0.0f);
}

TEST_CASE("ring width widens the collar") {
    Mask m = mask_rows({"00000",
                        "00000",
                        "00100",
                        "00000",
                        "00000"});
    Mask out = ring(m, 2);
    CHECK(out.at(2, 2) == 0.0f);
    CHECK(out.at(2, 0) == 1.0f);  // distance 2 along the axis
    CHECK(out.at(0, 2) == 1.0f);
    CHECK(out.at(1, 1) == 1.0f);  // diagonal, within disk(2)
    CHECK(out.at(0, 0) == 0.0f);  // distance sqrt(8) is outside disk(2)
}
