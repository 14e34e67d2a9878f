#include "glacier/hydro.hpp"

#include "glacier/errors.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <random>
#include <vector>

using namespace glacier;
using namespace testutil;

TEST_CASE("filling leaves a sink-free ramp untouched") {
    Grid dem = const_grid(4, 4, 0.0f);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) dem.at(r, c) = float(r + c);
    CHECK(cells_equal(fill_sinks(dem), dem));
}

TEST_CASE("a pit rises to its lowest spill level") {
    Grid dem = make_grid(3, 3, {5, 5, 5, 5, 0, 5, 5, 3, 5});
    Grid out = fill_sinks(dem);
    CHECK(out.at(1, 1) == 3.0f);
    dem.at(1, 1) = 3.0f;
    CHECK(cells_equal(out, dem));
}

TEST_CASE("filling an all-nodata grid is a no-op") {
    Grid dem = const_grid(3, 3, -9999.0f);
    CHECK(cells_equal(fill_sinks(dem), dem));
}

TEST_CASE("cells beside nodata drain into the void and stay pits") {
    Grid walled = const_grid(5, 5, 9.0f);
    walled.at(1, 1) = 2.0f;
    Grid filled = fill_sinks(walled);
    CHECK(filled.at(1, 1) == 9.0f); // enclosed pit fills

    Grid vented = walled;
    vented.at(2, 2) = vented.nodata;
    Grid out = fill_sinks(vented);
    CHECK(out.at(1, 1) == 2.0f); // nodata neighbor acts as an outlet
}

TEST_CASE("direction picks the steepest distance-weighted descent") {
    Grid dem = make_grid(3, 3, {9, 8, 7, 8, 5, 4, 7, 4, 1});
    FlowField f = flow_direction_d8(dem);
    CHECK(f.at(1, 1) == 1);          // SE: drop 4 over sqrt(2) beats drop 1 east
    CHECK(f.at(2, 2) == kFlowSink);  // global minimum
    CHECK(f.at(0, 1) == 2);          // S: drop 3 beats SE's 4/sqrt(2)
}

TEST_CASE("equal drops resolve to the earliest direction in scan order") {
    Grid dem = make_grid(3, 3, {5, 5, 5, 5, 5, 4, 5, 4, 5});
    FlowField f = flow_direction_d8(dem);
    CHECK(f.at(1, 1) == 0); // E and S tie; E comes first
}

TEST_CASE("plateaus drain stepwise toward their spill edge") {
    Grid dem = make_grid(5, 1, {3, 2, 2, 2, 1});
    FlowField f = flow_direction_d8(dem);
    CHECK(f.at(0, 0) == 0);
    CHECK(f.at(0, 1) == 0);
    CHECK(f.at(0, 2) == 0);
    CHECK(f.at(0, 3) == 0);
    CHECK(f.at(0, 4) == kFlowSink);

    Grid acc = flow_accumulation(f);
    CHECK(acc.cells == std::vector<float>{1, 2, 3, 4, 5});
}

TEST_CASE("a level plain never drains") {
    Grid dem = const_grid(4, 3, 7.0f);
    FlowField f = flow_direction_d8(dem);
    for (int8_t d : f.dir) CHECK(d == kFlowSink);
    Grid acc = flow_accumulation(f);
    for (float v : acc.cells) CHECK(v == 1.0f);
}

TEST_CASE("nodata cells carry no direction and no accumulation") {
    Grid dem = make_grid(3, 1, {3, -9999.0f, 1});
    FlowField f = flow_direction_d8(dem);
    CHECK(f.at(0, 0) == kFlowSink); // the hole blocks the only descent
    CHECK(f.at(0, 1) == kFlowNodata);
    CHECK(f.at(0, 2) == kFlowSink);
    Grid acc = flow_accumulation(f);
    CHECK(acc.is_nodata(acc.at(0, 1)));
    CHECK(acc.at(0, 0) == 1.0f);
}

TEST_CASE("accumulation at the sinks accounts for every valid cell") {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        Grid dem = random_grid(rng, 14);
        FlowField f = flow_direction_d8(dem);
        Grid acc = flow_accumulation(f);
        long long at_sinks = 0, valid = 0;
        for (size_t i = 0; i < f.dir.size(); ++i) {
            if (f.dir[i] == kFlowNodata) continue;
            ++valid;
            if (f.dir[i] == kFlowSink) at_sinks += (long long)acc.cells[i];
        }
        CHECK(at_sinks == valid);
    }
}

TEST_CASE("basins label every cell with its sink") {
    Grid dem = make_grid(4, 1, {1, 2, 3, 1});
    LabeledMask basins = drainage_basins(flow_direction_d8(dem));
    CHECK(basins.cells == std::vector<float>{1, 1, 4, 4});

    Grid bowl = make_grid(3, 3, {9, 8, 7, 8, 5, 4, 7, 4, 1});
    LabeledMask one = drainage_basins(flow_direction_d8(bowl));
    for (float v : one.cells) CHECK(v == 9.0f); // sink is cell index 8
}

TEST_CASE("targeted basins take the first marked cell on the way down") {
    Grid dem = make_grid(4, 1, {4, 3, 2, 1});
    FlowField f = flow_direction_d8(dem);
    LabeledMask targets = f.make_grid(0.0f);

    SUBCASE("single target claims everything upstream") {
        targets.at(0, 1) = 7.0f;
        LabeledMask out = drainage_basins(f, targets);
        CHECK(out.cells == std::vector<float>{7, 7, 0, 0});
    }
    SUBCASE("nearer targets shadow farther ones") {
        targets.at(0, 1) = 7.0f;
        targets.at(0, 3) = 9.0f;
        LabeledMask out = drainage_basins(f, targets);
        CHECK(out.cells == std::vector<float>{7, 7, 9, 9});
    }
    SUBCASE("no target on the path means label zero") {
        LabeledMask out = drainage_basins(f, targets);
        CHECK(out.cells == std::vector<float>{0, 0, 0, 0});
    }
}

TEST_CASE("targeted basins reject a misaligned target raster") {
    Grid dem = make_grid(4, 1, {4, 3, 2, 1});
    FlowField f = flow_direction_d8(dem);
    LabeledMask targets = const_grid(3, 1, 0.0f);
    CHECK_THROWS_AS(drainage_basins(f, targets), structural_error);
}

TEST_CASE("grids minted from a flow field inherit its georeferencing") {
    Grid dem = const_grid(3, 2, 1.0f, 15.0);
    dem.origin_x = 100.0;
    dem.origin_y = 200.0;
    FlowField f = flow_direction_d8(dem);
    Grid g = f.make_grid(0.5f);
    CHECK(g.width == 3);
    CHECK(g.height == 2);
    CHECK(g.cellsize == 15.0);
    CHECK(g.origin_x == 100.0);
    CHECK(g.origin_y == 200.0);
    CHECK(g.at(1, 2) == 0.5f);
}
