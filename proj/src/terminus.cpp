#include "glacier/terminus.hpp"

#include "glacier/errors.hpp"
#include "glacier/log.hpp"
#include "glacier/morphology.hpp"
#include "glacier/raster_ops.hpp"
#include "glacier/threading.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace glacier {

bool FeatureStack::valid(int r, int c) const {
    const float* f = at(r, c);
    for (int k = 0; k < dim; ++k)
        if (std::isnan(f[k])) return false;
    return true;
}

FeatureStack LocalStatsFeatureProvider::build(const MultiBandStack& stack) const {
    if (stack.empty()) throw structural_error("cannot build features from an empty stack");
    MultiBandStack norm = normalize_stack(stack);
    int w = norm.width(), h = norm.height();
    int nch = (int)norm.channels.size();
    int rad = window_ / 2;

    FeatureStack fs;
    fs.width = w;
    fs.height = h;
    fs.dim = nch * 3;
    fs.data.assign((size_t)w * h * fs.dim, std::numeric_limits<float>::quiet_NaN());

    for (int ch = 0; ch < nch; ++ch) {
        const Grid& g = norm.channels[ch].second;
        // Windowed sums of value and value^2 over valid cells via prefix
        // tables; the std uses the population form.
        std::vector<double> s1((size_t)(w + 1) * (h + 1), 0.0);
        std::vector<double> s2((size_t)(w + 1) * (h + 1), 0.0);
        std::vector<int> cn((size_t)(w + 1) * (h + 1), 0);
        for (int r = 0; r < h; ++r) {
            for (int c = 0; c < w; ++c) {
                size_t i = (size_t)(r + 1) * (w + 1) + (c + 1);
                float v = g.at(r, c);
                bool ok = !g.is_nodata(v);
                double dv = ok ? (double)v : 0.0;
                s1[i] = dv + s1[i - 1] + s1[i - (w + 1)] - s1[i - (w + 1) - 1];
                s2[i] = dv * dv + s2[i - 1] + s2[i - (w + 1)] - s2[i - (w + 1) - 1];
                cn[i] = (ok ? 1 : 0) + cn[i - 1] + cn[i - (w + 1)] - cn[i - (w + 1) - 1];
            }
        }
        parallel_rows(h, [&](int r0, int r1) {
            for (int r = r0; r < r1; ++r) {
                int rt = std::max(0, r - rad), rb = std::min(h - 1, r + rad);
                for (int c = 0; c < w; ++c) {
                    if (!g.valid_at(r, c)) continue; // vector stays NaN
                    int cl = std::max(0, c - rad), cr = std::min(w - 1, c + rad);
                    auto box = [&](const auto& t) {
                        return t[(size_t)(rb + 1) * (w + 1) + (cr + 1)] -
                               t[(size_t)rt * (w + 1) + (cr + 1)] -
                               t[(size_t)(rb + 1) * (w + 1) + cl] + t[(size_t)rt * (w + 1) + cl];
                    };
                    double n = (double)box(cn);
                    double mean = box(s1) / n;
                    double var = std::max(0.0, box(s2) / n - mean * mean);
                    float* f = fs.at(r, c);
                    f[ch * 3 + 0] = g.at(r, c);
                    f[ch * 3 + 1] = (float)mean;
                    f[ch * 3 + 2] = (float)std::sqrt(var);
                }
            }
        });
    }

    // A cell missing in any channel is invalid outright.
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            float* f = fs.at(r, c);
            bool any_nan = false;
            for (int k = 0; k < fs.dim && !any_nan; ++k) any_nan = std::isnan(f[k]);
            if (any_nan)
                for (int k = 0; k < fs.dim; ++k) f[k] = std::numeric_limits<float>::quiet_NaN();
        }
    }
    return fs;
}

FeatureStack features_from_grids(const std::vector<Grid>& planes) {
    if (planes.empty()) throw structural_error("no feature planes given");
    for (size_t i = 1; i < planes.size(); ++i)
        require_aligned(planes[0], planes[i], "feature plane " + std::to_string(i));
    FeatureStack fs;
    fs.width = planes[0].width;
    fs.height = planes[0].height;
    fs.dim = (int)planes.size();
    fs.data.resize((size_t)fs.width * fs.height * fs.dim);
    for (int r = 0; r < fs.height; ++r) {
        for (int c = 0; c < fs.width; ++c) {
            float* f = fs.at(r, c);
            bool bad = false;
            for (size_t k = 0; k < planes.size(); ++k) {
                float v = planes[k].at(r, c);
                if (planes[k].is_nodata(v)) bad = true;
                f[k] = v;
            }
            if (bad)
                for (size_t k = 0; k < planes.size(); ++k)
                    f[k] = std::numeric_limits<float>::quiet_NaN();
        }
    }
    return fs;
}

Mask postprocess_mask(const Mask& mask, const Grid& slope, int min_area,
                      int hole_max_area, float hole_max_slope) {
    return fill_holes(remove_small_regions(mask, min_area), slope, hole_max_area,
                      hole_max_slope);
}

std::vector<TerminusCase> detect_terminus_boxes(const Mask& d1, const Grid& dem,
                                                const TerminusParams& params) {
    require_aligned(d1, dem, "dem");
    if (params.low_alt_fraction <= 0.0f || params.low_alt_fraction > 1.0f)
        throw structural_error("low_alt_fraction must be in (0, 1]");
    int w = d1.width, h = d1.height;

    RegionSet cc = connected_components(d1, 8);
    std::vector<TerminusCase> cases;
    if (cc.regions.empty()) {
        log_warn("terminus detection: no glacier regions in the candidate mask");
        return cases;
    }

    // Per-region cell lists, gathered in one pass.
    std::vector<std::vector<int>> region_cells(cc.regions.size());
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            float l = cc.labels.at(r, c);
            if (!cc.labels.is_nodata(l) && l > 0.0f)
                region_cells[(size_t)l - 1].push_back(r * w + c);
        }
    }

    for (const Region& reg : cc.regions) {
        std::vector<float> elev;
        elev.reserve(reg.area);
        for (int i : region_cells[reg.label - 1]) {
            float z = dem.cells[i];
            if (!dem.is_nodata(z)) elev.push_back(z);
        }
        if (elev.empty()) {
            log_warn("terminus detection: glacier " + std::to_string(reg.label) +
                     " has no elevation data, skipped");
            continue;
        }
        // Threshold at the k-th smallest elevation, k covering the lowest
        // low_alt_fraction of the distribution.
        size_t k = std::max<size_t>(
            1, (size_t)std::ceil((double)params.low_alt_fraction * elev.size()));
        k = std::min(k, elev.size());
        std::nth_element(elev.begin(), elev.begin() + (k - 1), elev.end());
        float cutoff = elev[k - 1];

        Mask low = d1.like(0.0f);
        for (int i : region_cells[reg.label - 1]) {
            float z = dem.cells[i];
            if (!dem.is_nodata(z) && z <= cutoff) low.cells[i] = 1.0f;
        }
        RegionSet lowcc = connected_components(low, 8);
        const Region* best = nullptr;
        for (const Region& lr : lowcc.regions)
            if (!best || lr.area > best->area) best = &lr; // ties keep the first label

        TerminusCase tc;
        tc.glacier_code = reg.label;
        tc.box.min_r = std::max(0, best->min_r - params.box_pad);
        tc.box.min_c = std::max(0, best->min_c - params.box_pad);
        tc.box.max_r = std::min(h - 1, best->max_r + params.box_pad);
        tc.box.max_c = std::min(w - 1, best->max_c + params.box_pad);
        tc.e1 = crop(d1, tc.box.min_r, tc.box.min_c, tc.box.height(), tc.box.width());
        cases.push_back(std::move(tc));
    }
    return cases;
}

bool disagreement(const Mask& e1, const Mask& e2, float iou_thresh) {
    require_aligned(e1, e2, "e2");
    long long inter = 0, uni = 0;
    for (size_t i = 0; i < e1.cells.size(); ++i) {
        bool a = !e1.is_nodata(e1.cells[i]) && e1.cells[i] != 0.0f;
        bool b = !e2.is_nodata(e2.cells[i]) && e2.cells[i] != 0.0f;
        if (a || b) ++uni;
        if (a && b) ++inter;
    }
    if (uni == 0) return false;
    double iou = (double)inter / (double)uni;
    return iou < (double)iou_thresh;
}

namespace {

struct Sample {
    const float* f;
    int label; // 1 positive, 0 negative
};

// Majority label among the k nearest samples; distance ties resolve by
// insertion order (the sort key includes the index), label ties positive.
int knn_classify(const std::vector<Sample>& samples, const float* query, int dim, int k) {
    struct Entry {
        double d2;
        int idx;
    };
    std::vector<Entry> ds;
    ds.reserve(samples.size());
    for (size_t i = 0; i < samples.size(); ++i) {
        double d2 = 0.0;
        for (int j = 0; j < dim; ++j) {
            double diff = (double)query[j] - samples[i].f[j];
            d2 += diff * diff;
        }
        ds.push_back({d2, (int)i});
    }
    int keff = std::min<int>(k, (int)ds.size());
    std::partial_sort(ds.begin(), ds.begin() + keff, ds.end(), [](const Entry& a, const Entry& b) {
        return a.d2 != b.d2 ? a.d2 < b.d2 : a.idx < b.idx;
    });
    int pos = 0;
    for (int i = 0; i < keff; ++i) pos += samples[ds[i].idx].label;
    return 2 * pos >= keff ? 1 : 0;
}

inline bool mask_pos(const Mask& m, size_t i) {
    return !m.is_nodata(m.cells[i]) && m.cells[i] != 0.0f;
}

} // namespace

Mask knn_refine(const TerminusCase& tcase, const FeatureStack& features,
                const TerminusParams& params) {
    const Mask& e1 = tcase.e1;
    const Mask& e2 = tcase.e2;
    require_aligned(e1, e2, "e2");
    int bw = e1.width, bh = e1.height;
    if (tcase.box.width() != bw || tcase.box.height() != bh)
        throw structural_error("terminus case clips do not match its box");
    if (features.width <= tcase.box.max_c || features.height <= tcase.box.max_r)
        throw structural_error("feature stack does not cover the terminus box");
    if (params.knn_k <= 0) throw structural_error("knn_k must be positive");

    Mask both = e1.like(0.0f);
    Mask either = e1.like(0.0f);
    for (size_t i = 0; i < both.cells.size(); ++i) {
        bool a = mask_pos(e1, i), b = mask_pos(e2, i);
        both.cells[i] = (a && b) ? 1.0f : 0.0f;
        either.cells[i] = (a || b) ? 1.0f : 0.0f;
    }
    Mask collar = ring(either, params.ring_width);

    auto absolute_feature = [&](int i) -> const float* {
        int r = tcase.box.min_r + i / bw;
        int c = tcase.box.min_c + i % bw;
        return features.valid(r, c) ? features.at(r, c) : nullptr;
    };

    std::vector<Sample> samples;
    for (size_t i = 0; i < both.cells.size(); ++i) {
        if (both.cells[i] != 1.0f) continue;
        if (const float* f = absolute_feature((int)i)) samples.push_back({f, 1});
    }
    size_t n_pos = samples.size();
    for (size_t i = 0; i < collar.cells.size(); ++i) {
        if (collar.is_nodata(collar.cells[i]) || collar.cells[i] != 1.0f) continue;
        if (const float* f = absolute_feature((int)i)) samples.push_back({f, 0});
    }
    if (n_pos == 0 || samples.size() == n_pos) {
        log_warn("terminus refinement: glacier " + std::to_string(tcase.glacier_code) +
                 " lacks " + (n_pos == 0 ? "positive" : "negative") +
                 " samples, keeping the second candidate");
        return e2;
    }

    Mask out = both;
    for (size_t i = 0; i < out.cells.size(); ++i) {
        bool a = mask_pos(e1, i), b = mask_pos(e2, i);
        if (a == b) continue; // settled cells
        const float* f = absolute_feature((int)i);
        if (!f) {
            // No usable features: keep the second candidate's opinion.
            out.cells[i] = b ? 1.0f : 0.0f;
            continue;
        }
        if (knn_classify(samples, f, features.dim, params.knn_k)) out.cells[i] = 1.0f;
    }
    // Carry nodata through before smoothing so close() preserves it.
    for (size_t i = 0; i < out.cells.size(); ++i)
        if (e2.is_nodata(e2.cells[i])) out.cells[i] = out.nodata;
    return close(out, params.close_radius);
}

Mask vegetation_zone_removal(const Mask& mask, const Grid& ndvi_grid, float veg_thresh,
                             int close_radius) {
    require_aligned(mask, ndvi_grid, "ndvi");
    Mask out = mask;
    for (size_t i = 0; i < out.cells.size(); ++i) {
        if (out.is_nodata(out.cells[i]) || out.cells[i] == 0.0f) continue;
        float v = ndvi_grid.cells[i];
        if (!ndvi_grid.is_nodata(v) && v > veg_thresh) out.cells[i] = 0.0f;
    }
    return close(out, close_radius);
}

Mask refine_termini(const MaskPair& pair, const Grid& dem, const FeatureStack& features,
                    const Grid& ndvi_grid, const TerminusParams& params) {
    require_aligned(pair.d1, pair.d2, "d2");
    require_aligned(pair.d1, dem, "dem");
    require_aligned(pair.d1, ndvi_grid, "ndvi");
    if (features.width != pair.d1.width || features.height != pair.d1.height)
        throw structural_error("feature stack is not aligned with the candidate masks");

    Mask refined = pair.d2;
    std::vector<TerminusCase> cases = detect_terminus_boxes(pair.d1, dem, params);
    for (TerminusCase& tc : cases) {
        tc.e2 = crop(pair.d2, tc.box.min_r, tc.box.min_c, tc.box.height(), tc.box.width());
        tc.disagreement = disagreement(tc.e1, tc.e2, params.iou_thresh);
        Mask sub = tc.disagreement ? knn_refine(tc, features, params) : tc.e2;
        sub = vegetation_zone_removal(
            sub, crop(ndvi_grid, tc.box.min_r, tc.box.min_c, tc.box.height(), tc.box.width()),
            params.veg_thresh, params.close_radius);
        for (int r = 0; r < sub.height; ++r)
            for (int c = 0; c < sub.width; ++c)
                refined.at(tc.box.min_r + r, tc.box.min_c + c) = sub.at(r, c);
    }
    return refined;
}

} // namespace glacier
