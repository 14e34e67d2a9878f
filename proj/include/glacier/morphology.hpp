#pragma once

#include "glacier/grid.hpp"

#include <cstdint>

namespace glacier {

struct Region {
    int label = 0;          // 1-based, assigned in row-major first-encounter order
    long long area = 0;
    int min_r = 0, min_c = 0, max_r = 0, max_c = 0; // inclusive bounding box
    std::vector<int32_t> border_cells; // linear indices of cells with an 8-neighbor outside the region
};

struct RegionSet {
    LabeledMask labels; // 0 background, nodata preserved
    std::vector<Region> regions;
};

// Positive-cell components under the given connectivity (4 or 8). Nodata
// cells are background.
RegionSet connected_components(const Mask& mask, int connectivity);

// Drops 8-connected positive regions with area < min_area; area == min_area
// is kept.
Mask remove_small_regions(const Mask& mask, int min_area);

// Fills 4-connected zero regions that do not touch the grid border, when
// area <= max_area and the mean slope over the hole's valid-slope cells is
// <= max_slope degrees. Holes with no valid slope cell are left open.
Mask fill_holes(const Mask& mask, const Grid& slope, int max_area, float max_slope);

// Disk(radius) structuring element offsets: dr^2 + dc^2 <= radius^2 + radius,
// so radius 1 covers the full 8-neighborhood.
std::vector<std::pair<int, int>> disk_offsets(int radius);

// Morphological closing (dilate then erode by disk(radius)). The dilation
// is kept on an r-wide halo around the grid so the erosion sees it; that
// makes the operation extensive (result contains the input) and idempotent.
Mask close(const Mask& mask, int radius);

// dilate(mask, disk(width)) minus mask: the width-wide collar just outside
// the positive region, clipped to the grid.
Mask ring(const Mask& mask, int width);

} // namespace glacier
