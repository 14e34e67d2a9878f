#include "glacier/scaz.hpp"

#include "glacier/errors.hpp"
#include "glacier/grid_io.hpp"
#include "glacier/hydro.hpp"
#include "glacier/log.hpp"
#include "glacier/morphology.hpp"
#include "glacier/spectral.hpp"
#include "glacier/terrain.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace glacier {

namespace {

bool positive(const Grid& m, size_t i) { return !m.is_nodata(m.cells[i]) && m.cells[i] > 0.0f; }

} // namespace

Mask adjust_snowline(const Mask& d2, const Mask& d1, const Grid& dem) {
    require_aligned(d2, d1, "d1");
    require_aligned(d2, dem, "dem");
    const int w = d2.width, h = d2.height;
    const size_t n = (size_t)w * h;

    RegionSet r2 = connected_components(d2, 8);
    RegionSet r1 = connected_components(d1, 8);
    const int n2 = (int)r2.regions.size();
    const int n1 = (int)r1.regions.size();

    // d2 region -> overlapping d1 regions, d1 region -> member cells.
    std::vector<std::vector<int>> overlaps(n2);
    std::vector<std::vector<size_t>> cells1(n1);
    std::vector<char> matched(n1, 0);
    for (size_t i = 0; i < n; ++i) {
        int l1 = (int)r1.labels.cells[i];
        if (l1 > 0) {
            cells1[l1 - 1].push_back(i);
            int l2 = (int)r2.labels.cells[i];
            if (l2 > 0) {
                overlaps[l2 - 1].push_back(l1);
                matched[l1 - 1] = 1;
            }
        }
    }

    std::vector<float> max2(n2, -std::numeric_limits<float>::infinity());
    std::vector<char> has2(n2, 0);
    for (size_t i = 0; i < n; ++i) {
        int l2 = (int)r2.labels.cells[i];
        if (l2 > 0 && !dem.is_nodata(dem.cells[i])) {
            max2[l2 - 1] = std::max(max2[l2 - 1], dem.cells[i]);
            has2[l2 - 1] = 1;
        }
    }

    Mask out = d2;
    for (int l2 = 1; l2 <= n2; ++l2) {
        auto& ov = overlaps[l2 - 1];
        if (ov.empty()) continue;
        std::sort(ov.begin(), ov.end());
        ov.erase(std::unique(ov.begin(), ov.end()), ov.end());
        if (!has2[l2 - 1]) {
            log_warn("snowline: late-date region " + std::to_string(l2) +
                     " has no valid elevation, left unadjusted");
            continue;
        }
        float m1 = -std::numeric_limits<float>::infinity();
        bool has1 = false;
        for (int l1 : ov)
            for (size_t i : cells1[l1 - 1])
                if (!dem.is_nodata(dem.cells[i])) {
                    m1 = std::max(m1, dem.cells[i]);
                    has1 = true;
                }
        if (!has1 || m1 <= max2[l2 - 1]) continue;
        for (int l1 : ov)
            for (size_t i : cells1[l1 - 1])
                if (!dem.is_nodata(dem.cells[i]) && dem.cells[i] > max2[l2 - 1])
                    out.cells[i] = 1.0f;
    }
    for (int l1 = 1; l1 <= n1; ++l1)
        if (!matched[l1 - 1])
            log_warn("snowline: early-date region " + std::to_string(l1) +
                     " overlaps no late-date region, ignored");
    return out;
}

MergedRegion build_merged_region(const Mask& ablation, const MultiBandStack& stack,
                                 const ScazParams& params) {
    if (stack.empty()) throw structural_error("merged region: empty band stack");
    require_aligned(ablation, stack.channels.front().second, "stack");
    const int w = ablation.width, h = ablation.height;
    const size_t n = (size_t)w * h;

    Grid idx = snow_index(stack);
    Mask snow = ablation.like(0.0f);
    for (size_t i = 0; i < n; ++i)
        if (!idx.is_nodata(idx.cells[i]) && idx.cells[i] < params.snow_thresh)
            snow.cells[i] = 1.0f;

    // Snow regions qualify through overlap with ablation or 8-adjacency to it.
    std::vector<char> near_abl(n, 0);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            size_t i = (size_t)r * w + c;
            if (!positive(ablation, i)) continue;
            for (int dr = -1; dr <= 1; ++dr)
                for (int dc = -1; dc <= 1; ++dc) {
                    int nr = r + dr, nc = c + dc;
                    if (nr >= 0 && nr < h && nc >= 0 && nc < w) near_abl[(size_t)nr * w + nc] = 1;
                }
        }
    RegionSet sr = connected_components(snow, 8);
    std::vector<char> keep(sr.regions.size() + 1, 0);
    for (size_t i = 0; i < n; ++i) {
        int l = (int)sr.labels.cells[i];
        if (l > 0 && near_abl[i]) keep[l] = 1;
    }

    MergedRegion out;
    out.merged = ablation.like(0.0f);
    for (size_t i = 0; i < n; ++i) {
        bool pos = positive(ablation, i) || (sr.labels.cells[i] > 0 && keep[(int)sr.labels.cells[i]]);
        if (pos)
            out.merged.cells[i] = 1.0f;
        else if (ablation.is_nodata(ablation.cells[i]))
            out.merged.cells[i] = out.merged.nodata;
    }

    // Interior gaps: zero pockets with no 4-connected route of zero cells to
    // the grid border. Nodata blocks the route.
    out.filled_gaps = ablation.like(0.0f);
    std::vector<char> reached(n, 0);
    std::deque<size_t> queue;
    auto is_zero = [&](size_t i) {
        return !out.merged.is_nodata(out.merged.cells[i]) && out.merged.cells[i] == 0.0f;
    };
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            if (r != 0 && r != h - 1 && c != 0 && c != w - 1) continue;
            size_t i = (size_t)r * w + c;
            if (is_zero(i) && !reached[i]) {
                reached[i] = 1;
                queue.push_back(i);
            }
        }
    constexpr int kDr4[4] = {-1, 1, 0, 0};
    constexpr int kDc4[4] = {0, 0, -1, 1};
    while (!queue.empty()) {
        size_t i = queue.front();
        queue.pop_front();
        int r = (int)(i / w), c = (int)(i % w);
        for (int d = 0; d < 4; ++d) {
            int nr = r + kDr4[d], nc = c + kDc4[d];
            if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
            size_t j = (size_t)nr * w + nc;
            if (!reached[j] && is_zero(j)) {
                reached[j] = 1;
                queue.push_back(j);
            }
        }
    }
    for (size_t i = 0; i < n; ++i)
        if (is_zero(i) && !reached[i]) {
            out.merged.cells[i] = 1.0f;
            out.filled_gaps.cells[i] = 1.0f;
        }

    out.ablation_labels = connected_components(ablation, 8).labels;
    return out;
}

BasinPartition basin_partition(const MergedRegion& mreg, const Grid& dem_prepared) {
    require_aligned(mreg.merged, dem_prepared, "dem");
    const int w = mreg.merged.width, h = mreg.merged.height;
    const size_t n = (size_t)w * h;
    auto in_merged = [&](int r, int c) {
        return r >= 0 && r < h && c >= 0 && c < w && positive(mreg.merged, (size_t)r * w + c);
    };

    FlowField flow = flow_direction_d8(dem_prepared);

    FlowField restricted = flow;
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            if (!in_merged(r, c)) continue;
            int8_t d = flow.at(r, c);
            if (d >= 0 && !in_merged(r + kFlowDr[d], c + kFlowDc[d])) restricted.at(r, c) = kFlowSink;
        }

    BasinPartition part;
    part.merged = mreg.merged;
    part.ablation_labels = mreg.ablation_labels;
    part.g1 = drainage_basins(restricted, mreg.ablation_labels);
    part.g3 = drainage_basins(flow, mreg.ablation_labels);
    for (size_t i = 0; i < n; ++i)
        if (!positive(mreg.merged, i)) {
            part.g1.cells[i] = 0.0f;
            part.g3.cells[i] = 0.0f;
        }

    // Segments: connected pieces of the positive-g3 footprint that stay
    // within one untargeted basin each.
    LabeledMask basins = drainage_basins(flow);
    part.g2_segments = mreg.merged.like(0.0f);
    auto eligible = [&](size_t i) { return positive(mreg.merged, i) && part.g3.cells[i] > 0.0f; };
    int next_id = 0;
    std::deque<size_t> queue;
    for (size_t start = 0; start < n; ++start) {
        if (!eligible(start) || part.g2_segments.cells[start] != 0.0f) continue;
        ++next_id;
        float basin_id = basins.cells[start];
        part.g2_segments.cells[start] = (float)next_id;
        queue.push_back(start);
        std::map<int, int> counts;
        while (!queue.empty()) {
            size_t i = queue.front();
            queue.pop_front();
            ++counts[(int)part.g3.cells[i]];
            int r = (int)(i / w), c = (int)(i % w);
            for (int dr = -1; dr <= 1; ++dr)
                for (int dc = -1; dc <= 1; ++dc) {
                    if (dr == 0 && dc == 0) continue;
                    int nr = r + dr, nc = c + dc;
                    if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
                    size_t j = (size_t)nr * w + nc;
                    if (eligible(j) && part.g2_segments.cells[j] == 0.0f &&
                        basins.cells[j] == basin_id) {
                        part.g2_segments.cells[j] = (float)next_id;
                        queue.push_back(j);
                    }
                }
        }
        int best_code = 0, best_count = -1;
        for (auto& [code, count] : counts)
            if (count > best_count) {
                best_code = code;
                best_count = count;
            }
        if (counts.size() > 1)
            log_warn("basin partition: segment " + std::to_string(next_id) +
                     " mixes glacier codes, keeping majority " + std::to_string(best_code));
        part.segment_codes.push_back(best_code);
    }
    return part;
}

LabeledMask prune_indirect(const BasinPartition& part, const Grid& dem_elev) {
    require_aligned(part.g3, dem_elev, "dem");
    const int w = part.g3.width, h = part.g3.height;
    const size_t n = (size_t)w * h;
    const int nseg = (int)part.segment_codes.size();

    LabeledMask g3p = part.g3;
    std::vector<std::vector<size_t>> seg_cells(nseg);
    for (size_t i = 0; i < n; ++i) {
        int s = (int)part.g2_segments.cells[i];
        if (s > 0) seg_cells[s - 1].push_back(i);
    }
    auto g1_at = [&](size_t i) { return (int)part.g1.cells[i]; };
    auto neighbor_g1 = [&](size_t i, int code) {
        int r = (int)(i / w), c = (int)(i % w);
        for (int dr = -1; dr <= 1; ++dr)
            for (int dc = -1; dc <= 1; ++dc) {
                if (dr == 0 && dc == 0) continue;
                int nr = r + dr, nc = c + dc;
                if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
                if (g1_at((size_t)nr * w + nc) == code) return true;
            }
        return false;
    };
    // Removing a segment clears its cells back to the confined claim: cells
    // the confined routing still assigns keep that code, the rest drop out.
    auto remove_segment = [&](int s) {
        for (size_t i : seg_cells[s])
            g3p.cells[i] = (float)std::max(0, g1_at(i));
    };

    std::vector<char> removed(nseg, 0);
    for (int s = 0; s < nseg; ++s) {
        int code = part.segment_codes[s];
        if (code <= 0) continue;
        bool in_diff = false, contact = false;
        for (size_t i : seg_cells[s]) {
            int g1 = g1_at(i);
            if ((int)g3p.cells[i] == code && g1 != code) in_diff = true;
            if (g1 == code || neighbor_g1(i, code)) contact = true;
            if (in_diff && contact) break;
        }
        if (in_diff && !contact) {
            removed[s] = 1;
            remove_segment(s);
        }
    }

    for (int s = 0; s < nseg; ++s) {
        if (removed[s]) continue;
        int code = part.segment_codes[s];
        if (code <= 0) continue;
        bool in_diff = false;
        for (size_t i : seg_cells[s])
            if ((int)g3p.cells[i] == code && g1_at(i) != code) {
                in_diff = true;
                break;
            }
        if (!in_diff) continue;

        // Boundary of the segment, and the part of it in contact with the
        // confined claim of the same code. A contact line sitting higher
        // than the boundary average marks inflow from above, not drainage.
        double border_sum = 0.0, contact_sum = 0.0;
        long border_cnt = 0, contact_cnt = 0;
        for (size_t i : seg_cells[s]) {
            int r = (int)(i / w), c = (int)(i % w);
            bool boundary = false;
            for (int dr = -1; dr <= 1 && !boundary; ++dr)
                for (int dc = -1; dc <= 1; ++dc) {
                    if (dr == 0 && dc == 0) continue;
                    int nr = r + dr, nc = c + dc;
                    if (nr < 0 || nr >= h || nc < 0 || nc >= w ||
                        part.g2_segments.cells[(size_t)nr * w + nc] != part.g2_segments.cells[i]) {
                        boundary = true;
                        break;
                    }
                }
            if (!boundary || dem_elev.is_nodata(dem_elev.cells[i])) continue;
            border_sum += dem_elev.cells[i];
            ++border_cnt;
            if (g1_at(i) == code || neighbor_g1(i, code)) {
                contact_sum += dem_elev.cells[i];
                ++contact_cnt;
            }
        }
        if (border_cnt == 0) {
            log_warn("indirect pruning: segment " + std::to_string(s + 1) +
                     " has no measurable boundary, kept");
            continue;
        }
        if (contact_cnt == 0) {
            removed[s] = 1;
            remove_segment(s);
            continue;
        }
        if (contact_sum / contact_cnt > border_sum / border_cnt) {
            removed[s] = 1;
            remove_segment(s);
        }
    }
    return g3p;
}

Mask estimate_scaz(const Mask& ablation_d2, const Mask& ablation_d1, const Grid& dem,
                   const MultiBandStack& stack, const ScazParams& params) {
    require_mask(ablation_d2, "d2");
    require_mask(ablation_d1, "d1");
    require_aligned(ablation_d2, dem, "dem");
    const int w = ablation_d2.width, h = ablation_d2.height;
    const size_t n = (size_t)w * h;

    Mask adjusted = adjust_snowline(ablation_d2, ablation_d1, dem);
    MergedRegion mreg = build_merged_region(adjusted, stack, params);
    Grid dem_smooth = smooth_dem(dem, params.smooth_radius);
    BasinPartition part = basin_partition(mreg, fill_sinks(dem_smooth));
    LabeledMask pruned = prune_indirect(part, dem_smooth);

    // Gap restoration: reopen the filled gaps, then let one closing pass
    // absorb the ones too small to stand as real openings.
    Mask x = ablation_d2.like(0.0f);
    for (size_t i = 0; i < n; ++i)
        if (positive(ablation_d2, i) ||
            (pruned.cells[i] > 0.0f && !positive(mreg.filled_gaps, i)))
            x.cells[i] = 1.0f;
    Mask closed = close(x, params.close_radius);
    Mask restored = x;
    for (size_t i = 0; i < n; ++i)
        if (positive(mreg.filled_gaps, i))
            restored.cells[i] = positive(closed, i) ? 1.0f : 0.0f;

    // Isolated regions: pieces with no ablation cells at all survive only at
    // min_isolated_area and up; pieces with late-date ablation cells always
    // survive, so the input mask is never eroded.
    RegionSet regions = connected_components(restored, 8);
    const int nreg = (int)regions.regions.size();
    std::vector<char> has_adjusted(nreg, 0), has_d2(nreg, 0);
    for (size_t i = 0; i < n; ++i) {
        int l = (int)regions.labels.cells[i];
        if (l <= 0) continue;
        if (positive(adjusted, i)) has_adjusted[l - 1] = 1;
        if (positive(ablation_d2, i)) has_d2[l - 1] = 1;
    }
    Mask out = restored;
    for (size_t i = 0; i < n; ++i) {
        int l = (int)regions.labels.cells[i];
        if (l <= 0) continue;
        const Region& reg = regions.regions[l - 1];
        bool keep = has_adjusted[l - 1] &&
                    (has_d2[l - 1] || reg.area >= params.min_isolated_area);
        if (!keep) out.cells[i] = 0.0f;
    }
    for (size_t i = 0; i < n; ++i)
        if (out.cells[i] == 0.0f && ablation_d2.is_nodata(ablation_d2.cells[i]))
            out.cells[i] = out.nodata;
    return out;
}

} // namespace glacier
