#include "glacier/morphology.hpp"

#include "glacier/errors.hpp"

#include <algorithm>
#include <deque>

namespace glacier {

namespace {

constexpr int kDr8[8] = {0, 1, 1, 1, 0, -1, -1, -1};
constexpr int kDc8[8] = {1, 1, 0, -1, -1, -1, 0, 1};
constexpr int kDr4[4] = {0, 1, 0, -1};
constexpr int kDc4[4] = {1, 0, -1, 0};

inline bool positive(const Mask& m, int r, int c) {
    float v = m.at(r, c);
    return !m.is_nodata(v) && v != 0.0f;
}

} // namespace

RegionSet connected_components(const Mask& mask, int connectivity) {
    if (connectivity != 4 && connectivity != 8)
        throw structural_error("connectivity must be 4 or 8");
    int w = mask.width, h = mask.height;
    const int* dr = connectivity == 8 ? kDr8 : kDr4;
    const int* dc = connectivity == 8 ? kDc8 : kDc4;
    int ndirs = connectivity;

    RegionSet out;
    out.labels = mask.like(0.0f);
    std::vector<int32_t> lab((size_t)w * h, 0);

    std::deque<int> queue;
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (!positive(mask, r, c) || lab[(size_t)r * w + c]) continue;
            int32_t id = (int32_t)out.regions.size() + 1;
            Region reg;
            reg.label = id;
            reg.min_r = reg.max_r = r;
            reg.min_c = reg.max_c = c;
            lab[(size_t)r * w + c] = id;
            queue.push_back(r * w + c);
            while (!queue.empty()) {
                int i = queue.front();
                queue.pop_front();
                int ir = i / w, ic = i % w;
                ++reg.area;
                reg.min_r = std::min(reg.min_r, ir);
                reg.max_r = std::max(reg.max_r, ir);
                reg.min_c = std::min(reg.min_c, ic);
                reg.max_c = std::max(reg.max_c, ic);
                for (int d = 0; d < ndirs; ++d) {
                    int nr = ir + dr[d], nc = ic + dc[d];
                    if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
                    if (!positive(mask, nr, nc) || lab[(size_t)nr * w + nc]) continue;
                    lab[(size_t)nr * w + nc] = id;
                    queue.push_back(nr * w + nc);
                }
            }
            out.regions.push_back(reg);
        }
    }

    // Border cells: any 8-neighbor outside the region (grid edge included),
    // collected row-major.
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            int32_t id = lab[(size_t)r * w + c];
            if (!id) continue;
            bool border = false;
            for (int d = 0; d < 8 && !border; ++d) {
                int nr = r + kDr8[d], nc = c + kDc8[d];
                if (nr < 0 || nr >= h || nc < 0 || nc >= w || lab[(size_t)nr * w + nc] != id)
                    border = true;
            }
            if (border) out.regions[id - 1].border_cells.push_back(r * w + c);
        }
    }

    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            out.labels.at(r, c) = mask.is_nodata(mask.at(r, c)) ? mask.nodata
                                                                : (float)lab[(size_t)r * w + c];
    return out;
}

Mask remove_small_regions(const Mask& mask, int min_area) {
    RegionSet cc = connected_components(mask, 8);
    Mask out = mask;
    for (size_t i = 0; i < out.cells.size(); ++i) {
        float l = cc.labels.cells[i];
        if (cc.labels.is_nodata(l) || l == 0.0f) continue;
        if (cc.regions[(size_t)l - 1].area < min_area) out.cells[i] = 0.0f;
    }
    return out;
}

Mask fill_holes(const Mask& mask, const Grid& slope, int max_area, float max_slope) {
    require_aligned(mask, slope, "slope");
    int w = mask.width, h = mask.height;

    // Flood each 4-connected zero region once; nodata cells are neither
    // hole material nor connectors.
    std::vector<char> seen((size_t)w * h, 0);
    Mask out = mask;
    std::deque<int> queue;
    std::vector<int> cells;
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            size_t i0 = (size_t)r * w + c;
            if (seen[i0] || mask.is_nodata(mask.cells[i0]) || mask.cells[i0] != 0.0f) continue;
            seen[i0] = 1;
            queue.push_back((int)i0);
            cells.clear();
            bool touches_border = false;
            double slope_sum = 0.0;
            long long slope_n = 0;
            while (!queue.empty()) {
                int i = queue.front();
                queue.pop_front();
                int ir = i / w, ic = i % w;
                cells.push_back(i);
                if (ir == 0 || ic == 0 || ir == h - 1 || ic == w - 1) touches_border = true;
                float sv = slope.cells[i];
                if (!slope.is_nodata(sv)) {
                    slope_sum += sv;
                    ++slope_n;
                }
                for (int d = 0; d < 4; ++d) {
                    int nr = ir + kDr4[d], nc = ic + kDc4[d];
                    if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
                    size_t ni = (size_t)nr * w + nc;
                    if (seen[ni] || mask.is_nodata(mask.cells[ni]) || mask.cells[ni] != 0.0f)
                        continue;
                    seen[ni] = 1;
                    queue.push_back((int)ni);
                }
            }
            if (touches_border || (long long)cells.size() > max_area || slope_n == 0) continue;
            if (slope_sum / slope_n <= (double)max_slope)
                for (int i : cells) out.cells[i] = 1.0f;
        }
    }
    return out;
}

std::vector<std::pair<int, int>> disk_offsets(int radius) {
    std::vector<std::pair<int, int>> offs;
    int limit = radius * radius + radius;
    for (int dr = -radius; dr <= radius; ++dr)
        for (int dc = -radius; dc <= radius; ++dc)
            if (dr * dr + dc * dc <= limit) offs.emplace_back(dr, dc);
    return offs;
}

Mask close(const Mask& mask, int radius) {
    if (radius < 0) throw structural_error("closing radius must be non-negative");
    if (radius == 0) return mask;
    int w = mask.width, h = mask.height;
    int pw = w + 2 * radius, ph = h + 2 * radius;
    auto offs = disk_offsets(radius);

    // Dilate into the padded frame. Only in-grid positives contribute, but
    // the dilation itself may extend into the halo.
    std::vector<char> dil((size_t)pw * ph, 0);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (!positive(mask, r, c)) continue;
            for (auto [dr, dc] : offs)
                dil[(size_t)(r + radius + dr) * pw + (c + radius + dc)] = 1;
        }
    }

    // Erode reading the halo, write only in-grid cells. Nodata cells stay
    // nodata regardless.
    Mask out = mask;
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (mask.is_nodata(mask.at(r, c))) continue;
            bool all = true;
            for (auto [dr, dc] : offs) {
                if (!dil[(size_t)(r + radius + dr) * pw + (c + radius + dc)]) {
                    all = false;
                    break;
                }
            }
            out.at(r, c) = all ? 1.0f : 0.0f;
        }
    }
    return out;
}

Mask ring(const Mask& mask, int width) {
    if (width <= 0) throw structural_error("ring width must be positive");
    int w = mask.width, h = mask.height;
    auto offs = disk_offsets(width);
    Mask out = mask.like(0.0f);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (!positive(mask, r, c)) continue;
            for (auto [dr, dc] : offs) {
                int nr = r + dr, nc = c + dc;
                if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
                out.at(nr, nc) = 1.0f;
            }
        }
    }
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (mask.is_nodata(mask.at(r, c)))
                out.at(r, c) = mask.nodata;
            else if (positive(mask, r, c))
                out.at(r, c) = 0.0f;
        }
    }
    return out;
}

} // namespace glacier
