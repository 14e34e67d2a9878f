#include "glacier/config.hpp"

#include "glacier/errors.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

using namespace glacier;

TEST_CASE("defaults cover the whole key set") {
    Config cfg = Config::defaults();
    CHECK(cfg.get_int("grid.window") == 512);
    CHECK(cfg.get_int("grid.stride") == 32);
    CHECK(cfg.get_double("grid.target_cellsize") == 15.0);
    CHECK(cfg.get_float("spectral.snow_thresh") == -0.4f);
    CHECK(cfg.get_int("morphology.min_area") == 445);
    CHECK(cfg.get_string("io.format") == "esri_ascii");
    CHECK(cfg.get_bool("io.write_normalized") == false);
    CHECK(cfg.get_bool("segment.baseline_enabled") == false);
    CHECK(cfg.get_double("terminus.iou_thresh") == 0.7);
    CHECK(!cfg.is_set("inputs.dem"));
    CHECK(!cfg.is_set("eval.sus_elevation"));
    CHECK(cfg.entries().size() == 41);
}

TEST_CASE("parsing overlays values onto the defaults") {
    Config cfg = Config::parse("  [grid]  \n"
                               "window=  256 # trailing comment\n"
                               "\n"
                               "# full-line comment\n"
                               "stride =8\n"
                               "[terminus]\n"
                               "knn_k = 7\n"
                               "knn_k = 9\n", // later lines win
                               ".");
    CHECK(cfg.get_int("grid.window") == 256);
    CHECK(cfg.get_int("grid.stride") == 8);
    CHECK(cfg.get_int("terminus.knn_k") == 9);
    CHECK(cfg.get_int("grid.target_cellsize") == 15); // untouched default
}

TEST_CASE("parse errors carry the source location") {
    auto parse = [](const char* text) { return Config::parse(text, ".", "t.ini"); };
    CHECK_THROWS_WITH_AS(parse("x = 1"), "t.ini:1: key outside any section", config_error);
    CHECK_THROWS_WITH_AS(parse("[terrain]\nbogus = 3"),
                         "t.ini:2: unknown config key: terrain.bogus", config_error);
    CHECK_THROWS_WITH_AS(parse("[io]\njunk"), "t.ini:2: expected key = value", config_error);
    CHECK_THROWS_WITH_AS(parse("[io"), "t.ini:1: unterminated section header", config_error);
    CHECK_THROWS_WITH_AS(parse("[]"), "t.ini:1: empty section name", config_error);
    CHECK_THROWS_WITH_AS(parse("[io]\n = 5"), "t.ini:2: empty key", config_error);
}

TEST_CASE("typed getters reject malformed values") {
    Config cfg = Config::defaults();
    cfg.set("grid.window", "24x");
    CHECK_THROWS_AS(cfg.get_int("grid.window"), config_error);
    cfg.set("spectral.snow_thresh", "cold");
    CHECK_THROWS_AS(cfg.get_double("spectral.snow_thresh"), config_error);
    cfg.set("io.write_normalized", "yes");
    CHECK_THROWS_AS(cfg.get_bool("io.write_normalized"), config_error);
    CHECK_THROWS_AS(cfg.raw("io.nope"), config_error);
    CHECK_THROWS_AS(cfg.set("io.nope", "1"), config_error);
}

TEST_CASE("validation rejects out-of-range settings") {
    auto with = [](const char* section, const char* line) {
        return Config::parse(std::string("[") + section + "]\n" + line + "\n", ".");
    };
    CHECK_THROWS_AS(with("grid", "window = 0"), config_error);
    CHECK_THROWS_AS(with("grid", "stride = -3"), config_error);
    CHECK_THROWS_AS(with("grid", "target_cellsize = 0"), config_error);
    CHECK_THROWS_AS(with("terrain", "sad_radius = -1"), config_error);
    CHECK_THROWS_AS(with("terminus", "iou_thresh = 1.5"), config_error);
    CHECK_THROWS_AS(with("terminus", "iou_thresh = 1"), config_error); // bound excluded
    CHECK_THROWS_AS(with("terminus", "low_alt_fraction = 0"), config_error);
    CHECK_THROWS_AS(with("terminus", "knn_k = 0"), config_error);
    CHECK_THROWS_AS(with("spectral", "snow_thresh = -1"), config_error);
    CHECK_THROWS_AS(with("io", "format = geotiff"), config_error);
    CHECK_THROWS_AS(with("eval", "margin = -1"), config_error);
    CHECK_THROWS_AS(with("eval", "sus_elevation = high"), config_error);
    CHECK_THROWS_WITH_AS(with("inputs", "dem = /no/such/file.asc"),
                         "inputs.dem: file not found: /no/such/file.asc", config_error);
    // the values above the failing ones are all legal
    CHECK_NOTHROW(with("terminus", "iou_thresh = 0.99"));
    CHECK_NOTHROW(with("eval", "margin = 0"));
}

TEST_CASE("relative paths resolve against the config directory") {
    Config cfg = Config::parse("", "/data/scene");
    cfg.set("inputs.dem", "rasters/dem.asc");
    CHECK(cfg.resolve_path("inputs.dem") == "/data/scene/rasters/dem.asc");
    cfg.set("inputs.dem", "/abs/dem.asc");
    CHECK(cfg.resolve_path("inputs.dem") == "/abs/dem.asc");
    cfg.set("inputs.dem", "");
    CHECK(cfg.resolve_path("inputs.dem") == "");
}

TEST_CASE("path lists split on commas and skip blanks") {
    Config cfg = Config::parse("", "/data");
    cfg.set("inputs.features", "a.asc, b.asc ,, /abs/c.asc");
    std::vector<std::string> got = cfg.resolve_path_list("inputs.features");
    REQUIRE(got.size() == 3);
    CHECK(got[0] == "/data/a.asc");
    CHECK(got[1] == "/data/b.asc");
    CHECK(got[2] == "/abs/c.asc");
}

TEST_CASE("serialization is canonical and round-trips") {
    Config cfg = Config::defaults();
    cfg.set("grid.window", "256");
    cfg.set("io.format", "raw_f32");
    std::string text = cfg.serialize();
    CHECK(text.rfind("[eval]\nmargin = 32\nsus_elevation = \n", 0) == 0);
    Config back = Config::parse(text, ".");
    CHECK(back.entries() == cfg.entries());
    CHECK(back.serialize() == text);
}

TEST_CASE("loading reads the file and anchors its directory") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "glacier_cfg_test";
    fs::create_directories(dir);
    { std::ofstream((dir / "dem.asc").string()) << "placeholder"; }
    {
        std::ofstream out((dir / "run.ini").string());
        out << "[inputs]\ndem = dem.asc\n[eval]\nmargin = 4\n";
    }
    Config cfg = Config::load((dir / "run.ini").string());
    CHECK(cfg.get_int("eval.margin") == 4);
    CHECK(cfg.resolve_path("inputs.dem") == (dir / "dem.asc").string());
    CHECK_THROWS_AS(Config::load((dir / "absent.ini").string()), config_error);
    fs::remove_all(dir);
}
