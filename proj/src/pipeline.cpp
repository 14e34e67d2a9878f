#include "glacier/pipeline.hpp"

#include "glacier/errors.hpp"
#include "glacier/eval.hpp"
#include "glacier/grid_io.hpp"
#include "glacier/hydro.hpp"
#include "glacier/log.hpp"
#include "glacier/morphology.hpp"
#include "glacier/raster_ops.hpp"
#include "glacier/scaz.hpp"
#include "glacier/spectral.hpp"
#include "glacier/terminus.hpp"
#include "glacier/terrain.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

namespace glacier {

namespace {

struct Stage {
    explicit Stage(const Config& config) : cfg(config) {
        out_dir = cfg.resolve_path("io.out_dir");
        ext = cfg.get_string("io.format") == "raw_f32" ? ".raw" : ".asc";
        std::filesystem::create_directories(out_dir);
    }

    std::string write(const Grid& g, const std::string& name) {
        std::string path = out_dir + "/" + name + ext;
        write_grid(g, path);
        written.push_back(path);
        return path;
    }

    std::string write_text(const std::string& text, const std::string& filename) {
        std::string path = out_dir + "/" + filename;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw io_error("cannot open for writing: " + path);
        out << text;
        if (!out) throw io_error("write failed: " + path);
        written.push_back(path);
        return path;
    }

    const Config& cfg;
    std::string out_dir;
    std::string ext;
    std::vector<std::string> written;
};

Grid load_resampled(const Config& cfg, const std::string& key, double target) {
    Grid g = read_grid(cfg.resolve_path(key));
    if (std::abs(g.cellsize - target) > 1e-9 * std::max(1.0, target))
        g = resample_nearest(g, target);
    return g;
}

Grid load_dem(const Config& cfg) {
    if (!cfg.is_set("inputs.dem")) throw config_error("inputs.dem is required for this stage");
    return load_resampled(cfg, "inputs.dem", cfg.get_double("grid.target_cellsize"));
}

Mask load_mask(const Config& cfg, const std::string& key, const Grid& dem) {
    Mask m = load_resampled(cfg, key, cfg.get_double("grid.target_cellsize"));
    if (!same_geometry(m, dem)) throw structural_error(key + " is misaligned with the dem");
    require_mask(m, key);
    return m;
}

TerrainParams terrain_params_from(const Config& cfg) {
    TerrainParams p;
    p.sad_radius = cfg.get_int("terrain.sad_radius");
    return p;
}

// The full channel stack: provided bands, the elevation model, and the five
// derived layers. Spectral indices read the raw band values, so bands are
// stacked unnormalized.
MultiBandStack build_stack(const Config& cfg, const Grid& dem, const TerrainLayers& layers) {
    MultiBandStack stack;
    double target = cfg.get_double("grid.target_cellsize");
    for (int b = 1; b <= 11; ++b) {
        std::string key = "inputs.b" + std::to_string(b);
        if (!cfg.is_set(key)) continue;
        Grid g = load_resampled(cfg, key, target);
        if (!same_geometry(g, dem)) throw structural_error(key + " is misaligned with the dem");
        stack.add(*role_from_name("b" + std::to_string(b)), std::move(g));
    }
    stack.add(ChannelRole::DEM, dem);
    stack.add(ChannelRole::SLOPE, layers.slope);
    stack.add(ChannelRole::PROFC, layers.profc);
    stack.add(ChannelRole::TANC, layers.tanc);
    stack.add(ChannelRole::UNSPH, layers.unsph);
    stack.add(ChannelRole::SAD, layers.sad);
    return stack;
}

Mask baseline_mask(const Config& cfg, const MultiBandStack& stack) {
    SpectralParams sp;
    sp.snow_thresh = cfg.get_float("spectral.snow_thresh");
    sp.veg_thresh = cfg.get_float("spectral.veg_thresh");
    sp.slope_max = cfg.get_float("spectral.slope_max");
    // Window clamped so scenes smaller than the configured window still
    // tile as a single block.
    int window = std::min({cfg.get_int("grid.window"), stack.width(), stack.height()});
    int stride = cfg.get_int("grid.stride");
    return tile_and_merge(stack, window, stride,
                          [&](const MultiBandStack& tile) { return baseline_segment(tile, sp); });
}

Mask postprocess_from(const Config& cfg, const Mask& m, const Grid& slope) {
    return postprocess_mask(m, slope, cfg.get_int("morphology.min_area"),
                            cfg.get_int("morphology.hole_max_area"),
                            cfg.get_float("morphology.hole_max_slope"));
}

MaskPair load_pair(const Config& cfg, const Grid& dem, const MultiBandStack& stack,
                   const Grid& slope) {
    bool baseline_enabled = cfg.get_bool("segment.baseline_enabled");
    Mask baseline;
    bool have_baseline = false;
    auto get = [&](const std::string& key) {
        if (cfg.is_set(key)) return load_mask(cfg, key, dem);
        if (!baseline_enabled)
            throw config_error(key + " is missing and segment.baseline_enabled is false");
        if (!have_baseline) {
            baseline = baseline_mask(cfg, stack);
            have_baseline = true;
        }
        return baseline;
    };
    MaskPair pair;
    pair.d1 = postprocess_from(cfg, get("inputs.d1"), slope);
    pair.d2 = postprocess_from(cfg, get("inputs.d2"), slope);
    return pair;
}

TerminusParams terminus_params_from(const Config& cfg) {
    TerminusParams p;
    p.low_alt_fraction = cfg.get_float("terminus.low_alt_fraction");
    p.box_pad = cfg.get_int("terminus.box_pad");
    p.iou_thresh = cfg.get_float("terminus.iou_thresh");
    p.knn_k = cfg.get_int("terminus.knn_k");
    p.ring_width = cfg.get_int("terminus.ring_width");
    p.close_radius = cfg.get_int("morphology.close_radius");
    p.veg_thresh = cfg.get_float("spectral.veg_thresh");
    return p;
}

ScazParams scaz_params_from(const Config& cfg) {
    ScazParams p;
    p.snow_thresh = cfg.get_float("spectral.snow_thresh");
    p.close_radius = cfg.get_int("morphology.close_radius");
    p.min_isolated_area = cfg.get_int("scaz.min_isolated_area");
    p.smooth_radius = cfg.get_int("terrain.smooth_radius");
    return p;
}

FeatureStack features_for(const Config& cfg, const MultiBandStack& stack, const Grid& dem) {
    if (cfg.is_set("inputs.features")) {
        std::vector<Grid> planes;
        double target = cfg.get_double("grid.target_cellsize");
        for (const std::string& path : cfg.resolve_path_list("inputs.features")) {
            Grid g = read_grid(path);
            if (std::abs(g.cellsize - target) > 1e-9 * std::max(1.0, target))
                g = resample_nearest(g, target);
            if (!same_geometry(g, dem))
                throw structural_error("inputs.features: " + path + " is misaligned with the dem");
            planes.push_back(std::move(g));
        }
        return features_from_grids(planes);
    }
    return LocalStatsFeatureProvider().build(stack);
}

struct Refined {
    MaskPair pair;
    Mask f;
};

Refined refined_mask(const Config& cfg, const Grid& dem, const MultiBandStack& stack,
                     const TerrainLayers& layers, Stage& stage) {
    Refined out;
    out.pair = load_pair(cfg, dem, stack, layers.slope);
    stage.write(out.pair.d1, "d1_post");
    stage.write(out.pair.d2, "d2_post");
    FeatureStack features = features_for(cfg, stack, dem);
    Grid dem_smooth = smooth_dem(dem, cfg.get_int("terrain.smooth_radius"));
    out.f = refine_termini(out.pair, dem_smooth, features, ndvi(stack),
                           terminus_params_from(cfg));
    stage.write(out.f, "refined_ablation");
    return out;
}

void write_hydro(Stage& stage, const Grid& dem, const Config& cfg) {
    Grid filled = fill_sinks(smooth_dem(dem, cfg.get_int("terrain.smooth_radius")));
    stage.write(filled, "filled_dem");
    FlowField flow = flow_direction_d8(filled);
    Grid dirs = flow.make_grid(0.0f);
    for (int r = 0; r < flow.height; ++r)
        for (int c = 0; c < flow.width; ++c) {
            int8_t d = flow.at(r, c);
            dirs.at(r, c) = d == kFlowNodata ? dirs.nodata : (float)d;
        }
    stage.write(dirs, "flow_dir");
    stage.write(flow_accumulation(flow), "flow_accum");
    stage.write(drainage_basins(flow), "basins");
}

std::string evaluate_to_text(const Config& cfg, const Mask& pred, const Mask& ref,
                             const Grid* dem) {
    std::optional<float> sus;
    if (cfg.is_set("eval.sus_elevation")) sus = cfg.get_float("eval.sus_elevation");
    MetricsReport report =
        evaluate(pred, ref, cfg.get_int("eval.margin"), sus ? dem : nullptr, sus);
    return serialize(report);
}

void write_manifest(Stage& stage, const Config& cfg) {
    nlohmann::json manifest;
    manifest["config"] = nlohmann::json::object();
    for (auto& [key, value] : cfg.entries()) manifest["config"][key] = value;
    manifest["outputs"] = stage.written;
    stage.write_text(manifest.dump(2) + "\n", "manifest.json");
}

} // namespace

std::vector<std::string> run_terrain(const Config& cfg) {
    Stage stage(cfg);
    Grid dem = load_dem(cfg);
    TerrainLayers layers = terrain_params(dem, terrain_params_from(cfg));
    stage.write(layers.slope, "slope");
    stage.write(layers.profc, "profc");
    stage.write(layers.tanc, "tanc");
    stage.write(layers.unsph, "unsph");
    stage.write(layers.sad, "sad");
    return stage.written;
}

std::vector<std::string> run_hydro(const Config& cfg) {
    Stage stage(cfg);
    write_hydro(stage, load_dem(cfg), cfg);
    return stage.written;
}

std::vector<std::string> run_segment(const Config& cfg) {
    Stage stage(cfg);
    Grid dem = load_dem(cfg);
    TerrainLayers layers = terrain_params(dem, terrain_params_from(cfg));
    MultiBandStack stack = build_stack(cfg, dem, layers);
    Mask baseline = baseline_mask(cfg, stack);
    stage.write(baseline, "baseline");
    stage.write(postprocess_from(cfg, baseline, layers.slope), "baseline_post");
    return stage.written;
}

std::vector<std::string> run_refine_termini(const Config& cfg) {
    Stage stage(cfg);
    Grid dem = load_dem(cfg);
    TerrainLayers layers = terrain_params(dem, terrain_params_from(cfg));
    MultiBandStack stack = build_stack(cfg, dem, layers);
    refined_mask(cfg, dem, stack, layers, stage);
    return stage.written;
}

std::vector<std::string> run_scaz(const Config& cfg) {
    Stage stage(cfg);
    Grid dem = load_dem(cfg);
    TerrainLayers layers = terrain_params(dem, terrain_params_from(cfg));
    MultiBandStack stack = build_stack(cfg, dem, layers);
    MaskPair pair = load_pair(cfg, dem, stack, layers.slope);
    Mask full = estimate_scaz(pair.d2, pair.d1, dem, stack, scaz_params_from(cfg));
    stage.write(full, "full_glacier");
    return stage.written;
}

std::vector<std::string> run_evaluate(const Config& cfg) {
    Stage stage(cfg);
    if (!cfg.is_set("inputs.pred")) throw config_error("inputs.pred is required for evaluate");
    if (!cfg.is_set("inputs.ref")) throw config_error("inputs.ref is required for evaluate");
    Grid dem;
    bool have_dem = cfg.is_set("inputs.dem");
    std::optional<float> sus;
    if (cfg.is_set("eval.sus_elevation")) sus = cfg.get_float("eval.sus_elevation");
    if (sus && !have_dem)
        throw config_error("eval.sus_elevation requires inputs.dem");
    if (have_dem) dem = load_dem(cfg);
    Mask pred = have_dem ? load_mask(cfg, "inputs.pred", dem)
                         : load_resampled(cfg, "inputs.pred", cfg.get_double("grid.target_cellsize"));
    if (!have_dem) require_mask(pred, "inputs.pred");
    Mask ref = load_resampled(cfg, "inputs.ref", cfg.get_double("grid.target_cellsize"));
    if (!same_geometry(ref, pred)) throw structural_error("inputs.ref is misaligned");
    require_mask(ref, "inputs.ref");
    MetricsReport report =
        evaluate(pred, ref, cfg.get_int("eval.margin"), sus ? &dem : nullptr, sus);
    stage.write_text(serialize(report), "metrics.txt");
    return stage.written;
}

std::vector<std::string> run_pipeline(const Config& cfg) {
    Stage stage(cfg);
    Grid dem = load_dem(cfg);
    TerrainLayers layers = terrain_params(dem, terrain_params_from(cfg));
    MultiBandStack stack = build_stack(cfg, dem, layers);

    if (cfg.get_bool("io.write_normalized")) {
        MultiBandStack normalized = normalize_stack(stack);
        for (auto& [role, grid] : normalized.channels)
            stage.write(grid, std::string("normalized_") + role_name(role));
    }
    stage.write(layers.slope, "slope");
    stage.write(layers.profc, "profc");
    stage.write(layers.tanc, "tanc");
    stage.write(layers.unsph, "unsph");
    stage.write(layers.sad, "sad");
    write_hydro(stage, dem, cfg);

    Refined refined = refined_mask(cfg, dem, stack, layers, stage);
    Mask full = estimate_scaz(refined.f, refined.pair.d1, dem, stack, scaz_params_from(cfg));
    stage.write(full, "full_glacier");

    if (cfg.is_set("inputs.ref")) {
        Mask ref = load_mask(cfg, "inputs.ref", dem);
        stage.write_text(evaluate_to_text(cfg, full, ref, &dem), "metrics.txt");
    }
    write_manifest(stage, cfg);
    return stage.written;
}

} // namespace glacier
