#pragma once

#include "glacier/grid.hpp"

#include <cstdint>

namespace glacier {

// Eight-direction flow codes in tie-break order; dr/dc give the step for
// each code.
inline constexpr int8_t kFlowSink = -1;
inline constexpr int8_t kFlowNodata = -2;
inline constexpr int kFlowDirCount = 8;
inline constexpr int kFlowDr[kFlowDirCount] = {0, 1, 1, 1, 0, -1, -1, -1};  // E SE S SW W NW N NE
inline constexpr int kFlowDc[kFlowDirCount] = {1, 1, 0, -1, -1, -1, 0, 1};

// Per-cell downstream directions plus the georeferencing of the source
// elevation model, so derived rasters stay aligned with it.
struct FlowField {
    int width = 0;
    int height = 0;
    double cellsize = 1.0;
    double origin_x = 0.0;
    double origin_y = 0.0;
    float nodata = -9999.0f;
    std::vector<int8_t> dir; // 0..7 direction code, kFlowSink, or kFlowNodata

    int8_t at(int r, int c) const { return dir[(size_t)r * width + c]; }
    int8_t& at(int r, int c) { return dir[(size_t)r * width + c]; }
    bool in_bounds(int r, int c) const { return r >= 0 && r < height && c >= 0 && c < width; }

    // Grid carrying the same georeferencing, for derived outputs.
    Grid make_grid(float fill) const;
};

// Priority-flood depression filling: the minimal raise after which every
// valid cell has a non-ascending 8-connected path to an outlet. Outlets are
// grid border cells and cells adjacent to nodata (holes drain like the
// border).
Grid fill_sinks(const Grid& dem);

// Steepest-descent directions: drop / distance with sqrt(2) diagonals,
// first direction in code order wins ties. Cells with no lower neighbor
// become SINK unless they sit on a plateau with a route to a spill cell, in
// which case they point along the shortest equal-elevation path toward it.
FlowField flow_direction_d8(const Grid& dem);

// Number of cells whose flow path passes through each cell, itself
// included. Nodata where the field is nodata.
Grid flow_accumulation(const FlowField& flow);

// Basin label per cell: the linear index (+1) of the sink its path reaches.
LabeledMask drainage_basins(const FlowField& flow);

// Targeted variant: the code of the first positive target region the
// downstream path enters, 0 when the path hits a sink without touching one.
LabeledMask drainage_basins(const FlowField& flow, const LabeledMask& targets);

} // namespace glacier
