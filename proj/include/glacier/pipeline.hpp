#pragma once

#include "glacier/config.hpp"

#include <string>
#include <vector>

namespace glacier {

// Each stage loads what it needs through the config, writes its artifacts
// into io.out_dir in io.format, and returns the paths written. Stages are
// independently runnable; run_pipeline chains them, feeding the refined
// ablation mask into the accumulation-zone stage, and finishes with a
// manifest echoing the effective configuration next to the output list.
std::vector<std::string> run_terrain(const Config& cfg);
std::vector<std::string> run_hydro(const Config& cfg);
std::vector<std::string> run_segment(const Config& cfg);
std::vector<std::string> run_refine_termini(const Config& cfg);
std::vector<std::string> run_scaz(const Config& cfg);
std::vector<std::string> run_evaluate(const Config& cfg);
std::vector<std::string> run_pipeline(const Config& cfg);

} // namespace glacier
