#include "glacier/grid.hpp"

#include "glacier/errors.hpp"

#include <array>
#include <cctype>

namespace glacier {

bool same_geometry(const Grid& a, const Grid& b) {
    return a.width == b.width && a.height == b.height &&
           a.cellsize == b.cellsize &&
           a.origin_x == b.origin_x && a.origin_y == b.origin_y;
}

void require_aligned(const Grid& a, const Grid& b, const std::string& name) {
    if (!same_geometry(a, b)) {
        throw structural_error("grid '" + name + "' is not aligned: got " +
                               std::to_string(b.width) + "x" + std::to_string(b.height) +
                               " @" + std::to_string(b.cellsize) + ", expected " +
                               std::to_string(a.width) + "x" + std::to_string(a.height) +
                               " @" + std::to_string(a.cellsize));
    }
}

Grid crop(const Grid& g, int r0, int c0, int h, int w) {
    if (r0 < 0 || c0 < 0 || h <= 0 || w <= 0 || r0 + h > g.height || c0 + w > g.width)
        throw structural_error("crop window out of bounds");
    Grid out;
    out.width = w;
    out.height = h;
    out.cellsize = g.cellsize;
    out.nodata = g.nodata;
    // Window origin in world coordinates: x moves with the column offset,
    // y with the distance from the window bottom to the grid bottom.
    out.origin_x = g.origin_x + c0 * g.cellsize;
    out.origin_y = g.origin_y + (g.height - (r0 + h)) * g.cellsize;
    out.cells.resize((size_t)w * h);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            out.at(r, c) = g.at(r0 + r, c0 + c);
    return out;
}

namespace {
constexpr std::array<const char*, kChannelRoleCount> kRoleNames = {
    "b1", "b2", "b3", "b4", "b5", "b6", "b7", "b8", "b9", "b10", "b11",
    "dem", "slope", "profc", "tanc", "unsph", "sad",
};
}

const char* role_name(ChannelRole role) {
    return kRoleNames[static_cast<int>(role)];
}

std::optional<ChannelRole> role_from_name(const std::string& name) {
    std::string lower;
    lower.reserve(name.size());
    for (char ch : name) lower.push_back((char)std::tolower((unsigned char)ch));
    for (int i = 0; i < kChannelRoleCount; ++i)
        if (lower == kRoleNames[i]) return static_cast<ChannelRole>(i);
    return std::nullopt;
}

void MultiBandStack::add(ChannelRole role, Grid g) {
    if (find(role))
        throw structural_error(std::string("duplicate channel '") + role_name(role) + "'");
    if (!channels.empty())
        require_aligned(channels.front().second, g, role_name(role));
    channels.emplace_back(role, std::move(g));
}

const Grid* MultiBandStack::find(ChannelRole role) const {
    for (const auto& [r, g] : channels)
        if (r == role) return &g;
    return nullptr;
}

Grid* MultiBandStack::find(ChannelRole role) {
    for (auto& [r, g] : channels)
        if (r == role) return &g;
    return nullptr;
}

const Grid& MultiBandStack::require(ChannelRole role) const {
    const Grid* g = find(role);
    if (!g)
        throw structural_error(std::string("stack is missing channel '") + role_name(role) + "'");
    return *g;
}

} // namespace glacier
