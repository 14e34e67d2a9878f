#pragma once

#include "glacier/grid.hpp"

#include <functional>

namespace glacier {

// Nearest-neighbor resampling onto `target_cellsize`. Output dimensions are
// round(extent / target); each output cell takes the input cell whose
// center is nearest to its own. Nodata cells transfer as-is.
Grid resample_nearest(const Grid& in, double target_cellsize);
MultiBandStack resample_nearest(const MultiBandStack& in, double target_cellsize);

// Per-channel min-max rescale of valid cells to [0, 1]. A constant channel
// maps to all zeros. Channel order is preserved.
MultiBandStack normalize_stack(const MultiBandStack& stack);

// Sliding-window tiling: windows of `window` cells advance by `stride`
// left-to-right, top-to-bottom; the last window in each direction is
// clamped flush with the edge. `per_tile_fn` maps each tile to a binary
// mask of the same shape; overlapping outputs merge per cell by majority
// vote, ties positive. Tiles where the fn returns nodata cast no vote;
// cells with no votes come back nodata.
Mask tile_and_merge(const MultiBandStack& stack, int window, int stride,
                    const std::function<Mask(const MultiBandStack& tile)>& per_tile_fn);
Mask tile_and_merge(const Grid& grid, int window, int stride,
                    const std::function<Mask(const Grid& tile)>& per_tile_fn);

// Window offsets along one axis of length `extent`, as used by
// tile_and_merge. Exposed for tests.
std::vector<int> tile_offsets(int extent, int window, int stride);

} // namespace glacier
