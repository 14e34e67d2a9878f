#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace glacier {

// Single-band raster. Cells are row-major with row 0 at the top edge;
// origin_x/origin_y georeference the lower-left corner of the extent.
struct Grid {
    int width = 0;
    int height = 0;
    double cellsize = 1.0;
    double origin_x = 0.0;
    double origin_y = 0.0;
    float nodata = -9999.0f;
    std::vector<float> cells;

    Grid() = default;
    Grid(int w, int h, float fill = 0.0f) : width(w), height(h), cells((size_t)w * h, fill) {}

    float& at(int r, int c) { return cells[(size_t)r * width + c]; }
    float at(int r, int c) const { return cells[(size_t)r * width + c]; }

    bool in_bounds(int r, int c) const {
        return r >= 0 && r < height && c >= 0 && c < width;
    }

    // NaN counts as missing regardless of the sentinel so half-written
    // buffers never masquerade as data.
    bool is_nodata(float v) const { return v == nodata || std::isnan(v); }
    bool valid_at(int r, int c) const { return !is_nodata(at(r, c)); }

    size_t size() const { return cells.size(); }

    // Same shape, georeferencing and nodata sentinel, cells reset to `fill`.
    Grid like(float fill) const {
        Grid g = *this;
        g.cells.assign(g.cells.size(), fill);
        return g;
    }
};

// Binary raster: cells hold 0, 1 or the nodata sentinel.
using Mask = Grid;

// Integer-coded raster: positive codes label regions, 0 is background.
// Codes stay below 2^24 so float storage is exact.
using LabeledMask = Grid;

// True when shape, cellsize and origin match (exact compare; grids are
// either products of the same pipeline or misaligned).
bool same_geometry(const Grid& a, const Grid& b);

// Throws structural_error mentioning `name` when b is not aligned with a.
void require_aligned(const Grid& a, const Grid& b, const std::string& name);

// Sub-window copy; georeferencing shifts with the window. The window must
// lie inside the grid.
Grid crop(const Grid& g, int r0, int c0, int h, int w);

// Raster roles a scene stack can carry: eleven instrument bands plus the
// elevation model and five derived terrain layers.
enum class ChannelRole {
    B1, B2, B3, B4, B5, B6, B7, B8, B9, B10, B11,
    DEM, SLOPE, PROFC, TANC, UNSPH, SAD,
};

inline constexpr int kChannelRoleCount = 17;

const char* role_name(ChannelRole role);
std::optional<ChannelRole> role_from_name(const std::string& name);

// Ordered set of co-registered channels. Alignment is validated on add;
// duplicate roles are rejected.
struct MultiBandStack {
    std::vector<std::pair<ChannelRole, Grid>> channels;

    void add(ChannelRole role, Grid g);
    const Grid* find(ChannelRole role) const;
    Grid* find(ChannelRole role);

    // The named channel, or structural_error naming the role when absent.
    const Grid& require(ChannelRole role) const;

    int width() const { return channels.empty() ? 0 : channels.front().second.width; }
    int height() const { return channels.empty() ? 0 : channels.front().second.height; }
    bool empty() const { return channels.empty(); }
};

} // namespace glacier
