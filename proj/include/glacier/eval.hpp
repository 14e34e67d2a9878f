#pragma once

#include "glacier/grid.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace glacier {

// Inclusive cell rectangle, empty when r1 < r0 or c1 < c0.
struct CellBox {
    int r0 = 0, c0 = 0, r1 = -1, c1 = -1;
    bool empty() const { return r1 < r0 || c1 < c0; }
};

struct ConfusionCounts {
    std::uint64_t tp = 0, tn = 0, fp = 0, fn = 0;
    CellBox bounds; // box the counts were taken over
    std::uint64_t total() const { return tp + tn + fp + fn; }
};

// Each metric is empty when its denominator vanishes; "undefined" is kept
// distinct from zero.
struct Metrics {
    std::optional<double> iou, rc, sp, pc, fm, acc;
};

struct GlacierMetrics {
    int code = 0;
    ConfusionCounts counts;
    Metrics metrics;
};

struct MetricsReport {
    std::vector<GlacierMetrics> per_glacier; // ascending code order
    ConfusionCounts aggregate_counts;        // per-glacier counts summed
    Metrics aggregate;
};

// Cell-level confusion counts inside the bounding box of the positive cells
// of both masks, expanded by `margin` and clipped to the grid. Cells where
// either raster is nodata are skipped; with `exclude_above` set, cells whose
// (valid) elevation exceeds it are skipped too. No positive cell anywhere,
// or every cell excluded, is an error.
ConfusionCounts confusion(const Mask& pred, const Mask& ref, int margin,
                          const Grid* dem = nullptr,
                          std::optional<float> exclude_above = std::nullopt);

Metrics metrics(const ConfusionCounts& counts);

// Per-glacier evaluation: reference glaciers are its 8-connected regions;
// each is scored inside its own margin-expanded box against the full
// reference, so a neighboring glacier inside the box is not misread as
// background. Predicted positives beyond every box stay uncounted, which is
// the point of the boxes: distant background does not dilute the scores.
// The aggregate sums the per-glacier counts before computing metrics.
MetricsReport evaluate(const Mask& pred, const Mask& ref, int margin,
                       const Grid* dem = nullptr,
                       std::optional<float> exclude_above = std::nullopt);

// Flat key/value text: one "glacier_<code>.<metric> <value>" line per metric
// (iou, rc, pc, sp, fm, acc) and glacier, then the "aggregate.<metric>"
// lines; undefined metrics print as "undefined".
std::string serialize(const MetricsReport& report);

} // namespace glacier
