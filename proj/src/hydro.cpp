#include "glacier/hydro.hpp"

#include "glacier/errors.hpp"

#include <cmath>
#include <deque>
#include <queue>
#include <tuple>

namespace glacier {

Grid FlowField::make_grid(float fill) const {
    Grid g(width, height, fill);
    g.cellsize = cellsize;
    g.origin_x = origin_x;
    g.origin_y = origin_y;
    g.nodata = nodata;
    return g;
}

namespace {

FlowField field_like(const Grid& dem) {
    FlowField f;
    f.width = dem.width;
    f.height = dem.height;
    f.cellsize = dem.cellsize;
    f.origin_x = dem.origin_x;
    f.origin_y = dem.origin_y;
    f.nodata = dem.nodata;
    f.dir.assign((size_t)dem.width * dem.height, kFlowNodata);
    return f;
}

} // namespace

Grid fill_sinks(const Grid& dem) {
    int w = dem.width, h = dem.height;
    Grid out = dem;
    std::vector<char> seen((size_t)w * h, 0);

    // Min-heap on (filled elevation, index); the index tiebreak makes the
    // relaxation order, hence the result bits, independent of heap history.
    using Item = std::pair<float, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;

    auto is_outlet = [&](int r, int c) {
        if (r == 0 || c == 0 || r == h - 1 || c == w - 1) return true;
        for (int d = 0; d < kFlowDirCount; ++d)
            if (!dem.valid_at(r + kFlowDr[d], c + kFlowDc[d])) return true;
        return false;
    };

    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            int i = r * w + c;
            if (!dem.valid_at(r, c)) {
                seen[i] = 1;
                continue;
            }
            if (is_outlet(r, c)) {
                seen[i] = 1;
                pq.emplace(dem.at(r, c), i);
            }
        }
    }

    while (!pq.empty()) {
        auto [lvl, i] = pq.top();
        pq.pop();
        int r = i / w, c = i % w;
        for (int d = 0; d < kFlowDirCount; ++d) {
            int nr = r + kFlowDr[d], nc = c + kFlowDc[d];
            if (!dem.in_bounds(nr, nc)) continue;
            int ni = nr * w + nc;
            if (seen[ni]) continue;
            seen[ni] = 1;
            float nv = dem.at(nr, nc);
            out.at(nr, nc) = std::max(nv, lvl);
            pq.emplace(out.at(nr, nc), ni);
        }
    }
    return out;
}

FlowField flow_direction_d8(const Grid& dem) {
    int w = dem.width, h = dem.height;
    FlowField f = field_like(dem);
    const double diag = std::sqrt(2.0);

    std::deque<int> flats; // candidates for plateau routing

    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (!dem.valid_at(r, c)) continue;
            double z = dem.at(r, c);
            int best = -1;
            double best_drop = 0.0;
            bool has_equal = false;
            for (int d = 0; d < kFlowDirCount; ++d) {
                int nr = r + kFlowDr[d], nc = c + kFlowDc[d];
                if (!dem.in_bounds(nr, nc) || !dem.valid_at(nr, nc)) continue;
                double nz = dem.at(nr, nc);
                if (nz == z) has_equal = true;
                double drop = (z - nz) / (kFlowDr[d] && kFlowDc[d] ? diag : 1.0);
                if (drop > best_drop) {
                    best_drop = drop;
                    best = d;
                }
            }
            if (best >= 0)
                f.at(r, c) = (int8_t)best;
            else if (has_equal)
                f.at(r, c) = kFlowSink, flats.push_back(r * w + c); // provisional
            else
                f.at(r, c) = kFlowSink;
        }
    }

    // Plateau routing: breadth-first from cells that already drain, across
    // equal elevation, so each flat cell points one BFS level closer to its
    // spill. Cells no wave reaches stay SINK (isolated plateaus).
    std::vector<char> resolved((size_t)w * h, 0);
    for (int i = 0; i < w * h; ++i)
        resolved[i] = f.dir[i] >= 0;

    std::deque<int> queue;
    std::vector<char> queued((size_t)w * h, 0);
    for (int i : flats) {
        int r = i / w, c = i % w;
        double z = dem.at(r, c);
        for (int d = 0; d < kFlowDirCount; ++d) {
            int nr = r + kFlowDr[d], nc = c + kFlowDc[d];
            if (!dem.in_bounds(nr, nc)) continue;
            if (resolved[nr * w + nc] && (double)dem.at(nr, nc) == z) {
                queue.push_back(i);
                queued[i] = 1;
                break;
            }
        }
    }
    while (!queue.empty()) {
        int i = queue.front();
        queue.pop_front();
        int r = i / w, c = i % w;
        double z = dem.at(r, c);
        for (int d = 0; d < kFlowDirCount; ++d) {
            int nr = r + kFlowDr[d], nc = c + kFlowDc[d];
            if (!dem.in_bounds(nr, nc)) continue;
            int ni = nr * w + nc;
            if (resolved[ni] && (double)dem.at(nr, nc) == z) {
                f.dir[i] = (int8_t)d;
                break;
            }
        }
        resolved[i] = 1;
        for (int d = 0; d < kFlowDirCount; ++d) {
            int nr = r + kFlowDr[d], nc = c + kFlowDc[d];
            if (!dem.in_bounds(nr, nc)) continue;
            int ni = nr * w + nc;
            if (!queued[ni] && !resolved[ni] && f.dir[ni] == kFlowSink &&
                (double)dem.at(nr, nc) == z && dem.valid_at(nr, nc)) {
                queue.push_back(ni);
                queued[ni] = 1;
            }
        }
    }
    return f;
}

namespace {

// Downstream linear index, or -1 for SINK/nodata.
inline int next_index(const FlowField& f, int i) {
    int8_t d = f.dir[i];
    if (d < 0) return -1;
    int r = i / f.width + kFlowDr[d];
    int c = i % f.width + kFlowDc[d];
    return r * f.width + c;
}

} // namespace

Grid flow_accumulation(const FlowField& flow) {
    int n = flow.width * flow.height;
    std::vector<int> indegree(n, 0);
    int valid_cells = 0;
    for (int i = 0; i < n; ++i) {
        if (flow.dir[i] == kFlowNodata) continue;
        ++valid_cells;
        int j = next_index(flow, i);
        if (j >= 0) ++indegree[j];
    }

    Grid acc = flow.make_grid(flow.nodata);
    std::vector<long long> count(n, 0);
    std::deque<int> ready;
    for (int i = 0; i < n; ++i)
        if (flow.dir[i] != kFlowNodata && indegree[i] == 0) ready.push_back(i);

    int processed = 0;
    while (!ready.empty()) {
        int i = ready.front();
        ready.pop_front();
        ++processed;
        ++count[i]; // the cell itself
        int j = next_index(flow, i);
        if (j >= 0) {
            count[j] += count[i];
            if (--indegree[j] == 0) ready.push_back(j);
        }
    }
    if (processed != valid_cells)
        throw structural_error("flow field contains a cycle: " +
                               std::to_string(valid_cells - processed) +
                               " cells never drained");
    for (int i = 0; i < n; ++i)
        if (flow.dir[i] != kFlowNodata) acc.cells[i] = (float)count[i];
    return acc;
}

namespace {

// Iterative downstream walk with memoization. `terminal` maps a finished
// cell to its label: sink cells directly, target cells by code.
template <typename TerminalFn>
LabeledMask resolve_paths(const FlowField& flow, const TerminalFn& terminal_label) {
    int n = flow.width * flow.height;
    LabeledMask out = flow.make_grid(flow.nodata);
    std::vector<float> memo(n, -1.0f); // -1 = unresolved
    std::vector<int> path;
    for (int i = 0; i < n; ++i) {
        if (flow.dir[i] == kFlowNodata) continue;
        int cur = i;
        path.clear();
        float label = 0.0f;
        while (true) {
            if (memo[cur] >= 0.0f) {
                label = memo[cur];
                break;
            }
            float t = terminal_label(cur);
            if (t >= 0.0f) {
                label = t;
                break;
            }
            path.push_back(cur);
            if (path.size() > (size_t)n)
                throw structural_error("flow field contains a cycle");
            cur = next_index(flow, cur);
        }
        for (int j : path) memo[j] = label;
        memo[i] = label;
        out.cells[i] = label;
    }
    return out;
}

} // namespace

LabeledMask drainage_basins(const FlowField& flow) {
    return resolve_paths(flow, [&](int i) -> float {
        return flow.dir[i] == kFlowSink ? (float)(i + 1) : -1.0f;
    });
}

LabeledMask drainage_basins(const FlowField& flow, const LabeledMask& targets) {
    if (targets.width != flow.width || targets.height != flow.height)
        throw structural_error("targets raster is not aligned with the flow field");
    return resolve_paths(flow, [&](int i) -> float {
        float t = targets.cells[i];
        if (!targets.is_nodata(t) && t > 0.0f) return t;
        return flow.dir[i] == kFlowSink ? 0.0f : -1.0f;
    });
}

} // namespace glacier
