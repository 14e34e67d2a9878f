#pragma once

#include "glacier/grid.hpp"

namespace glacier {

struct TerrainParams {
    // Box radius of the reference surface used by the aspect-difference
    // layer: each cell's aspect is compared against the aspect of the
    // smoothed elevation model.
    int sad_radius = 5;
};

// Mean of valid cells in the (2*radius+1)^2 window clipped to the grid.
// Nodata cells stay nodata; radius 0 is the identity.
Grid smooth_dem(const Grid& dem, int radius);

struct TerrainLayers {
    Grid slope; // degrees, atan of gradient magnitude
    Grid profc; // curvature along the gradient direction
    Grid tanc;  // curvature along the contour direction
    Grid unsph; // half the spread of the principal curvatures, >= 0
    Grid sad;   // |wrapped aspect difference vs smoothed surface| / 180, in [0,1]
};

// Quadratic surface fit over each 3x3 neighborhood. Cells on the grid
// border or adjacent to nodata have no full stencil and come back nodata
// in every layer. Flat cells carry 0 in the aspect-derived layer and 0
// curvature.
TerrainLayers terrain_params(const Grid& dem, const TerrainParams& params = {});

} // namespace glacier
