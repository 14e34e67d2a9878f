#include "glacier/raster_ops.hpp"

#include "glacier/errors.hpp"
#include "glacier/kernels.hpp"
#include "glacier/threading.hpp"

#include <cmath>
#include <cstdint>

namespace glacier {

Grid resample_nearest(const Grid& in, double target_cellsize) {
    if (target_cellsize <= 0) throw structural_error("target cellsize must be positive");
    if (in.width == 0 || in.height == 0) throw structural_error("cannot resample an empty grid");
    if (target_cellsize == in.cellsize) return in;

    Grid out;
    out.width = std::max(1, (int)std::llround(in.width * in.cellsize / target_cellsize));
    out.height = std::max(1, (int)std::llround(in.height * in.cellsize / target_cellsize));
    out.cellsize = target_cellsize;
    out.origin_x = in.origin_x;
    out.origin_y = in.origin_y;
    out.nodata = in.nodata;
    out.cells.resize((size_t)out.width * out.height);

    parallel_rows(out.height, [&](int r0, int r1) {
        for (int r = r0; r < r1; ++r) {
            // Distances measured from the top-left of the extent; rows grow
            // downward in both grids so the same mapping serves both axes.
            double y = (r + 0.5) * target_cellsize;
            int sr = std::min(in.height - 1, std::max(0, (int)(y / in.cellsize)));
            for (int c = 0; c < out.width; ++c) {
                double x = (c + 0.5) * target_cellsize;
                int sc = std::min(in.width - 1, std::max(0, (int)(x / in.cellsize)));
                out.at(r, c) = in.at(sr, sc);
            }
        }
    });
    return out;
}

MultiBandStack resample_nearest(const MultiBandStack& in, double target_cellsize) {
    MultiBandStack out;
    for (const auto& [role, g] : in.channels) out.add(role, resample_nearest(g, target_cellsize));
    return out;
}

MultiBandStack normalize_stack(const MultiBandStack& stack) {
    MultiBandStack out;
    for (const auto& [role, g] : stack.channels) {
        Grid n = g.like(0.0f);
        auto mm = kernels::minmax_valid(g.cells.data(), g.cells.size(), g.nodata);
        if (!mm.any || mm.min == mm.max) {
            // Constant (or empty) channel: zero signal everywhere it is valid.
            for (size_t i = 0; i < g.cells.size(); ++i)
                n.cells[i] = g.is_nodata(g.cells[i]) ? g.nodata : 0.0f;
        } else {
            float range = mm.max - mm.min;
            const float* src = g.cells.data();
            float* dst = n.cells.data();
            size_t w = (size_t)g.width;
            parallel_rows(g.height, [&](int r0, int r1) {
                kernels::rescale_valid(src + (size_t)r0 * w, dst + (size_t)r0 * w,
                                       (size_t)(r1 - r0) * w, g.nodata,
                                       mm.min, range, g.nodata);
            });
        }
        out.add(role, std::move(n));
    }
    return out;
}

std::vector<int> tile_offsets(int extent, int window, int stride) {
    std::vector<int> offs;
    for (int o = 0; o + window <= extent; o += stride) offs.push_back(o);
    // Clamp the final window flush with the edge when the stride overshoots.
    if (offs.empty() || offs.back() + window < extent) offs.push_back(extent - window);
    return offs;
}

namespace {

// Vote accumulation shared by both tile_and_merge overloads. `get_tile`
// copies out the sub-window, `run` applies the per-tile fn.
template <typename Source, typename Fn>
Mask tile_merge_impl(const Source& src, int width, int height, float out_nodata,
                     double cellsize, double origin_x, double origin_y,
                     int window, int stride, const Fn& run) {
    if (window <= 0 || stride <= 0)
        throw structural_error("tile window and stride must be positive");
    if (window > width || window > height)
        throw structural_error("tile window " + std::to_string(window) +
                               " exceeds grid extent " + std::to_string(width) + "x" +
                               std::to_string(height));

    std::vector<uint32_t> votes((size_t)width * height, 0);
    std::vector<uint32_t> positives((size_t)width * height, 0);

    // Tiles run sequentially: the callback's thread-safety is not part of
    // its contract, and vote counts are order-independent anyway.
    for (int ro : tile_offsets(height, window, stride)) {
        for (int co : tile_offsets(width, window, stride)) {
            Mask t = run(src, ro, co, window);
            if (t.width != window || t.height != window)
                throw structural_error("per-tile fn returned " + std::to_string(t.width) +
                                       "x" + std::to_string(t.height) + ", expected " +
                                       std::to_string(window) + "x" + std::to_string(window));
            for (int r = 0; r < window; ++r) {
                for (int c = 0; c < window; ++c) {
                    float v = t.at(r, c);
                    if (t.is_nodata(v)) continue;
                    size_t idx = (size_t)(ro + r) * width + (co + c);
                    ++votes[idx];
                    if (v != 0.0f) ++positives[idx];
                }
            }
        }
    }

    Mask out;
    out.width = width;
    out.height = height;
    out.cellsize = cellsize;
    out.origin_x = origin_x;
    out.origin_y = origin_y;
    out.nodata = out_nodata;
    out.cells.resize((size_t)width * height);
    for (size_t i = 0; i < out.cells.size(); ++i) {
        if (votes[i] == 0)
            out.cells[i] = out_nodata;
        else
            out.cells[i] = (2 * positives[i] >= votes[i]) ? 1.0f : 0.0f;
    }
    return out;
}

} // namespace

Mask tile_and_merge(const MultiBandStack& stack, int window, int stride,
                    const std::function<Mask(const MultiBandStack& tile)>& per_tile_fn) {
    if (stack.empty()) throw structural_error("cannot tile an empty stack");
    const Grid& first = stack.channels.front().second;
    return tile_merge_impl(
        stack, first.width, first.height, first.nodata,
        first.cellsize, first.origin_x, first.origin_y, window, stride,
        [&](const MultiBandStack& s, int ro, int co, int w) {
            MultiBandStack tile;
            for (const auto& [role, g] : s.channels) tile.add(role, crop(g, ro, co, w, w));
            return per_tile_fn(tile);
        });
}

Mask tile_and_merge(const Grid& grid, int window, int stride,
                    const std::function<Mask(const Grid& tile)>& per_tile_fn) {
    return tile_merge_impl(
        grid, grid.width, grid.height, grid.nodata,
        grid.cellsize, grid.origin_x, grid.origin_y, window, stride,
        [&](const Grid& g, int ro, int co, int w) { return per_tile_fn(crop(g, ro, co, w, w)); });
}

} // namespace glacier
