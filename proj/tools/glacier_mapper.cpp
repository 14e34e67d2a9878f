#include "glacier/config.hpp"
#include "glacier/errors.hpp"
#include "glacier/log.hpp"
#include "glacier/pipeline.hpp"
#include "glacier/threading.hpp"

#include <CLI11.hpp>

#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace {

// Exit codes: 0 success, 2 configuration or usage problem, 3 data problem.
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Batch glacier mapping: terrain layers, flow routing, terminus refinement "
                 "and accumulation-zone estimation over raster scenes"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    int threads = 1;
    bool verbose = false;
    app.add_option("--config", config_path, "configuration file (required)")->required();
    app.add_option("--threads", threads, "worker thread cap (identical results at any value)")
        ->envname("GLACIER_MAPPER_THREADS")
        ->check(CLI::PositiveNumber);
    app.add_flag("--verbose", verbose, "report each written artifact on stderr");

    using StageFn = std::function<std::vector<std::string>(const glacier::Config&)>;
    const std::map<std::string, std::pair<const char*, StageFn>> stages = {
        {"terrain", {"write the five terrain layers derived from the elevation model",
                     glacier::run_terrain}},
        {"hydro", {"write the filled elevation model, flow directions, accumulation and basins",
                   glacier::run_hydro}},
        {"segment", {"write the threshold-based baseline glacier mask, raw and post-processed",
                     glacier::run_segment}},
        {"refine-termini", {"write the terminus-refined ablation mask built from the two "
                            "candidate masks",
                            glacier::run_refine_termini}},
        {"scaz", {"write the full glacier mask: ablation plus estimated accumulation zone",
                  glacier::run_scaz}},
        {"evaluate", {"score a predicted mask against a reference mask", glacier::run_evaluate}},
        {"pipeline", {"run every stage in order and write a manifest", glacier::run_pipeline}},
    };
    for (auto& [name, stage] : stages) app.add_subcommand(name, stage.first);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    glacier::set_verbose(verbose);
    glacier::set_thread_count(threads);

    try {
        glacier::Config cfg = glacier::Config::load(config_path);
        const std::string& sub = app.get_subcommands().front()->get_name();
        std::vector<std::string> written = stages.at(sub).second(cfg);
        for (const std::string& path : written) glacier::log_info("wrote " + path);
        return 0;
    } catch (const glacier::config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
}
