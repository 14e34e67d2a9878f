#include "glacier/terrain.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace glacier;
using namespace testutil;

namespace {

constexpr double kPi = 3.14159265358979323846;

Grid surface_grid(int w, int h, double cellsize, double (*z)(double, double)) {
    Grid g = const_grid(w, h, 0.0f, cellsize);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            double x = c * cellsize;
            double y = (h - 1 - r) * cellsize;
            g.at(r, c) = static_cast<float>(z(x, y));
        }
    return g;
}

// Quarter-turn index permutation for the rotation-consistency checks.
Grid rotate_quarter(const Grid& g) {
    Grid out = g.like(0.0f);
    for (int r = 0; r < g.height; ++r)
        for (int c = 0; c < g.width; ++c) out.at(r, c) = g.at(g.height - 1 - c, r);
    return out;
}

} // namespace

TEST_CASE("smoothing averages the full window at interior cells") {
    Grid g = make_grid(3, 3, {1, 2, 3, 4, 5, 6, 7, 8, 9});
    Grid s = smooth_dem(g, 1);
    CHECK(s.at(1, 1) == 5.0f);
    // corner sees only its 2x2 quadrant
    CHECK(s.at(0, 0) == doctest::Approx((1 + 2 + 4 + 5) / 4.0));
}

TEST_CASE("smoothing is the identity at radius zero and on constants") {
    Grid g = make_grid(3, 2, {1, 2, 3, 4, 5, 6});
    CHECK(cells_equal(smooth_dem(g, 0), g));
    Grid c = const_grid(7, 5, 3.25f);
    Grid s = smooth_dem(c, 2);
    CHECK(cells_equal(s, c));
}

TEST_CASE("smoothing skips nodata and never invents values") {
    Grid g = make_grid(3, 1, {2.0f, -9999.0f, 4.0f});
    Grid s = smooth_dem(g, 1);
    // each end cell's window holds one valid neighbour: itself
    CHECK(s.at(0, 0) == 2.0f);
    CHECK(s.is_nodata(s.at(0, 1)));
    CHECK(s.at(0, 2) == 4.0f);
    // a hole between two valid cells is averaged across
    Grid w = make_grid(4, 1, {2.0f, -9999.0f, 4.0f, 6.0f});
    Grid t = smooth_dem(w, 1);
    CHECK(t.at(0, 2) == 5.0f);
}

TEST_CASE("an inclined plane has uniform slope and zero curvature") {
    // z = 0.5 x: gradient 0.5 along +x
    Grid dem = surface_grid(9, 9, 10.0, [](double x, double) { return 0.5 * x; });
    TerrainLayers t = terrain_params(dem);
    double expect = std::atan(0.5) * 180.0 / kPi;
    for (int r = 1; r < 8; ++r)
        for (int c = 1; c < 8; ++c) {
            CHECK(std::fabs(t.slope.at(r, c) - expect) < 1e-5);
            CHECK(std::fabs(t.profc.at(r, c)) < 1e-6);
            CHECK(std::fabs(t.tanc.at(r, c)) < 1e-6);
            CHECK(std::fabs(t.unsph.at(r, c)) < 1e-6);
        }
}

TEST_CASE("a flat surface has zero slope and zero aspect difference") {
    Grid dem = const_grid(7, 7, 100.0f, 15.0);
    TerrainLayers t = terrain_params(dem);
    for (int r = 1; r < 6; ++r)
        for (int c = 1; c < 6; ++c) {
            CHECK(t.slope.at(r, c) == 0.0f);
            CHECK(t.sad.at(r, c) == 0.0f);
            CHECK(t.unsph.at(r, c) == 0.0f);
        }
}

TEST_CASE("border cells and nodata neighborhoods come back nodata") {
    Grid dem = surface_grid(6, 6, 10.0, [](double x, double y) { return x + y; });
    dem.at(3, 3) = dem.nodata;
    TerrainLayers t = terrain_params(dem);
    for (int c = 0; c < 6; ++c) {
        CHECK(t.slope.is_nodata(t.slope.at(0, c)));
        CHECK(t.slope.is_nodata(t.slope.at(5, c)));
    }
    // every cell whose 3x3 stencil touches the hole is nodata
    for (int r = 2; r <= 4; ++r)
        for (int c = 2; c <= 4; ++c) CHECK(t.slope.is_nodata(t.slope.at(r, c)));
    CHECK_FALSE(t.slope.is_nodata(t.slope.at(1, 1)));
}

TEST_CASE("a gentle paraboloid bowl is nearly spherical") {
    // z = -(x^2 + y^2) / (2 R): at the apex both principal curvatures equal
    // 1/R; over this extent the analytic spread stays below 3e-6, so any
    // reading past 1e-5 means the curvature algebra is off.
    Grid dem = surface_grid(21, 21, 5.0, [](double x, double y) {
        double cx = x - 50.0, cy = y - 50.0;
        return -(cx * cx + cy * cy) / (2.0 * 1000.0);
    });
    TerrainLayers t = terrain_params(dem);
    for (int r = 1; r < 20; ++r)
        for (int c = 1; c < 20; ++c) CHECK(std::fabs(t.unsph.at(r, c)) < 1e-5);
}

TEST_CASE("a hemisphere stays nearly spherical away from its rim") {
    Grid dem = surface_grid(21, 21, 5.0, [](double x, double y) {
        double cx = x - 50.0, cy = y - 50.0;
        double rr = 100.0 * 100.0 - cx * cx - cy * cy;
        return rr > 0 ? std::sqrt(rr) : 0.0;
    });
    TerrainLayers t = terrain_params(dem);
    // stay well inside the rim where the quadratic fit is accurate
    for (int r = 8; r <= 12; ++r)
        for (int c = 8; c <= 12; ++c) CHECK(std::fabs(t.unsph.at(r, c)) < 1e-4);
}

TEST_CASE("layers are consistent under a quarter-turn rotation") {
    Grid dem = surface_grid(15, 15, 10.0, [](double x, double y) {
        double cx = (x - 70.0) / 40.0, cy = (y - 70.0) / 40.0;
        return 80.0 * std::exp(-(cx * cx + cy * cy));
    });
    Grid rot = rotate_quarter(dem);
    TerrainLayers a = terrain_params(dem);
    TerrainLayers b = terrain_params(rot);
    // rotated-grid cell (r, c) came from source cell (14 - c, r), so the
    // rotation-invariant layers must match across that correspondence.
    for (int r = 1; r < 14; ++r)
        for (int c = 1; c < 14; ++c) {
            int sr = 14 - c, sc = r;
            if (sr < 1 || sr > 13 || sc < 1 || sc > 13) continue;
            CHECK(b.slope.at(r, c) == doctest::Approx(a.slope.at(sr, sc)).epsilon(1e-5));
            CHECK(b.unsph.at(r, c) == doctest::Approx(a.unsph.at(sr, sc)).epsilon(1e-5));
            CHECK(b.sad.at(r, c) == doctest::Approx(a.sad.at(sr, sc)).epsilon(1e-5));
            CHECK(b.profc.at(r, c) == doctest::Approx(a.profc.at(sr, sc)).epsilon(1e-5));
            CHECK(b.tanc.at(r, c) == doctest::Approx(a.tanc.at(sr, sc)).epsilon(1e-5));
        }
}

TEST_CASE("scaling elevations scales curvature and the slope tangent") {
    Grid dem = surface_grid(13, 13, 10.0, [](double x, double y) {
        double cx = (x - 60.0) / 35.0, cy = (y - 60.0) / 35.0;
        return 50.0 * std::exp(-(cx * cx + cy * cy)) + 0.2 * x;
    });
    Grid dem2 = dem;
    for (float& v : dem2.cells) v *= 2.0f;
    TerrainLayers a = terrain_params(dem);
    TerrainLayers b = terrain_params(dem2);
    for (int r = 1; r < 12; ++r)
        for (int c = 1; c < 12; ++c) {
            double ta = std::tan(a.slope.at(r, c) * kPi / 180.0);
            double tb = std::tan(b.slope.at(r, c) * kPi / 180.0);
            CHECK(tb == doctest::Approx(2.0 * ta).epsilon(1e-5));
            // aspect is scale-invariant
            CHECK(b.sad.at(r, c) == doctest::Approx(a.sad.at(r, c)).epsilon(1e-5));
        }
}
