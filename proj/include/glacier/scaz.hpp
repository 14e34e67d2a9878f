#pragma once

#include "glacier/grid.hpp"

namespace glacier {

struct ScazParams {
    float snow_thresh = -0.4f; // snow index below this reads as snow
    int close_radius = 2;      // closing radius used when restoring filled gaps
    int min_isolated_area = 445; // smallest surviving region that carries no ablation cells
    int smooth_radius = 2;     // elevation pre-filtering before routing and elevation reads
};

// Snowline correction: per glacier (a connected region of d2, matched with
// the d1 regions overlapping it), when d1 reaches a higher maximum
// elevation than d2, the d1 cells of that glacier lying above d2's maximum
// elevation are added. d1 regions overlapping nothing are dropped with a
// warning.
Mask adjust_snowline(const Mask& d2, const Mask& d1, const Grid& dem);

struct MergedRegion {
    Mask merged;                // ablation plus attached snow, interior gaps filled
    Mask filled_gaps;           // exactly the cells turned positive by gap filling
    LabeledMask ablation_labels; // connected ablation regions, codes 1..n
};

// Snow mask from the stack's snow index; snow regions neither overlapping
// nor 8-adjacent to the ablation mask are discarded; the union with the
// ablation mask has all interior gaps filled, with the filled cells
// recorded for later restoration.
MergedRegion build_merged_region(const Mask& ablation, const MultiBandStack& stack,
                                 const ScazParams& params = {});

struct BasinPartition {
    LabeledMask g1; // glacier code per merged cell, flow confined to the merged region
    LabeledMask g3; // glacier code per merged cell, whole-scene flow
    LabeledMask g2_segments;        // unique segment ids over merged cells with positive g3
    std::vector<int> segment_codes; // segment id - 1 -> inherited glacier code
    Mask merged;
    LabeledMask ablation_labels;
};

// Drainage partition of the merged region. g1 routes with links leaving
// the merged region cut (they become sinks at the border); g3 routes over
// the whole scene; g2 splits g3's footprint into per-basin connected
// segments, each inheriting its majority g3 code (warning when mixed).
// `dem_prepared` must already be smoothed and sink-filled.
BasinPartition basin_partition(const MergedRegion& mreg, const Grid& dem_prepared);

// Indirect-drainage pruning. Segments lying in the g3-minus-g1 difference
// of their code and neither overlapping nor touching same-code g1 are
// removed; of the remainder still in the recomputed difference, a segment
// whose shared borderline with same-code g1 sits higher, on average, than
// its entire boundary is removed too (its outflow enters the glacier from
// above, so the connection is not a drainage link). Removal never clears
// cells where g1 equals the segment code. Elevations read from
// `dem_elev` (the smoothed, unfilled surface).
LabeledMask prune_indirect(const BasinPartition& part, const Grid& dem_elev);

// Full accumulation-zone estimate: snowline adjustment, merged-region
// construction, basin partition, indirect pruning, gap restoration (filled
// gaps reopen unless a closing pass absorbs them), and isolated-region
// removal. Output is the complete glacier mask (ablation plus surviving
// snow); cells of the d2 input are never removed.
Mask estimate_scaz(const Mask& ablation_d2, const Mask& ablation_d1, const Grid& dem,
                   const MultiBandStack& stack, const ScazParams& params = {});

} // namespace glacier
