#pragma once

#include "glacier/grid.hpp"

namespace glacier {

struct SpectralParams {
    float snow_thresh = -0.4f; // snow index below this reads as snow
    float veg_thresh = 0.3f;   // vegetation index above this reads as vegetated
    float slope_max = 24.0f;   // degrees; steeper cells are excluded from the baseline mask
};

// (b5 - b4) / (b5 + b4). Nodata where either band is missing or the
// denominator is exactly zero.
Grid ndvi(const MultiBandStack& stack);

// (b6 - b3) / (b6 + b3); strongly negative over snow and ice. Same nodata
// rules as ndvi.
Grid snow_index(const MultiBandStack& stack);

// Index-threshold segmentation: 1 where snow_index < snow_thresh and the
// stack's slope channel < slope_max. Stands in for a learned segmenter
// when no candidate masks are supplied.
Mask baseline_segment(const MultiBandStack& stack, const SpectralParams& params = {});

} // namespace glacier
