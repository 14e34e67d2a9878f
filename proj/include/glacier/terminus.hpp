#pragma once

#include "glacier/grid.hpp"

#include <memory>

namespace glacier {

struct TerminusParams {
    float low_alt_fraction = 0.15f; // share of a glacier's elevation distribution called "terminus"
    int box_pad = 10;               // cells of padding around the low cluster's bounding box
    float iou_thresh = 0.7f;        // below this the two candidates disagree
    int knn_k = 5;                  // neighbors per pending cell; clamped to the sample count
    int ring_width = 5;             // collar width around the union that supplies negatives
    int close_radius = 2;           // smoothing radius after refinement and vegetation removal
    float veg_thresh = 0.3f;        // vegetation index above this is stripped from termini
};

// Inclusive cell-index window.
struct TerminusBox {
    int min_r = 0, min_c = 0, max_r = 0, max_c = 0;
    int height() const { return max_r - min_r + 1; }
    int width() const { return max_c - min_c + 1; }
};

// One glacier's terminus sub-problem. e1/e2 are the candidate masks clipped
// to the box; detect_terminus_boxes fills e1, refine_termini fills e2 and
// the disagreement flag.
struct TerminusCase {
    TerminusBox box;
    int glacier_code = 0;
    Mask e1, e2;
    bool disagreement = false;
};

struct MaskPair {
    Mask d1, d2;
};

// Per-cell feature vectors, cell-major. A cell whose vector holds any NaN
// is invalid and takes no part in sampling or classification.
struct FeatureStack {
    int width = 0, height = 0, dim = 0;
    std::vector<float> data;

    const float* at(int r, int c) const { return data.data() + ((size_t)r * width + c) * dim; }
    float* at(int r, int c) { return data.data() + ((size_t)r * width + c) * dim; }
    bool valid(int r, int c) const;
};

// Source of per-cell features for the KNN refinement.
class FeatureProvider {
public:
    virtual ~FeatureProvider() = default;
    virtual FeatureStack build(const MultiBandStack& stack) const = 0;
};

// Default provider: min-max normalized channels plus a local mean and
// standard deviation per channel over a window x window neighborhood.
class LocalStatsFeatureProvider : public FeatureProvider {
public:
    explicit LocalStatsFeatureProvider(int window = 5) : window_(window) {}
    FeatureStack build(const MultiBandStack& stack) const override;

private:
    int window_;
};

// Feature planes supplied as rasters (one band per plane), bypassing the
// built-in provider. A cell is invalid where any plane is nodata.
FeatureStack features_from_grids(const std::vector<Grid>& planes);

// Size threshold plus hole fill, the cleanup both candidate masks get
// before refinement.
Mask postprocess_mask(const Mask& mask, const Grid& slope, int min_area,
                      int hole_max_area, float hole_max_slope);

// Per glacier region of d1: the largest connected cluster of cells in the
// lowest `low_alt_fraction` of the region's elevations, its bounding box
// padded by box_pad and clipped to the grid. Cases come back in ascending
// glacier code order with e1 clipped from d1.
std::vector<TerminusCase> detect_terminus_boxes(const Mask& d1, const Grid& dem,
                                                const TerminusParams& params = {});

// IOU of the two clips strictly below iou_thresh; an empty union counts as
// agreement.
bool disagreement(const Mask& e1, const Mask& e2, float iou_thresh);

// KNN relabeling of the cells where the candidates disagree. Positives are
// the cells both masks claim, negatives come from a ring outside their
// union, pending cells (symmetric difference) take the majority label of
// their k nearest samples in feature space; ties in distance resolve by
// sample insertion order (positives then negatives, each row-major), label
// ties resolve positive. The result (positives plus accepted pending) is
// closed with close_radius. Without positives or negatives the case falls
// back to e2 with a warning.
Mask knn_refine(const TerminusCase& tcase, const FeatureStack& features,
                const TerminusParams& params = {});

// Removes cells with vegetation index above veg_thresh, then one closing
// pass. Cells with missing index are left as they were.
Mask vegetation_zone_removal(const Mask& mask, const Grid& ndvi_grid, float veg_thresh,
                             int close_radius);

// Full refinement: F starts as d2; every terminus box is re-decided (KNN
// when the candidates disagree, d2 otherwise) and vegetation-cleaned, then
// written back. Boxes are processed in ascending glacier code order, so
// later glaciers win overlaps. Both inputs must already be post-processed.
Mask refine_termini(const MaskPair& pair, const Grid& dem, const FeatureStack& features,
                    const Grid& ndvi_grid, const TerminusParams& params = {});

} // namespace glacier
