#include "glacier/spectral.hpp"

#include "glacier/errors.hpp"
#include "glacier/kernels.hpp"
#include "glacier/threading.hpp"

namespace glacier {

namespace {

Grid band_ratio(const Grid& a, const Grid& b) {
    Grid out = a.like(0.0f);
    const float* pa = a.cells.data();
    const float* pb = b.cells.data();
    float* po = out.cells.data();
    size_t w = (size_t)a.width;
    parallel_rows(a.height, [&](int r0, int r1) {
        kernels::normalized_difference(pa + (size_t)r0 * w, pb + (size_t)r0 * w,
                                       po + (size_t)r0 * w, (size_t)(r1 - r0) * w,
                                       a.nodata, b.nodata, out.nodata);
    });
    return out;
}

} // namespace

Grid ndvi(const MultiBandStack& stack) {
    const Grid& nir = stack.require(ChannelRole::B5);
    const Grid& red = stack.require(ChannelRole::B4);
    return band_ratio(nir, red);
}

Grid snow_index(const MultiBandStack& stack) {
    const Grid& swir = stack.require(ChannelRole::B6);
    const Grid& green = stack.require(ChannelRole::B3);
    return band_ratio(swir, green);
}

Mask baseline_segment(const MultiBandStack& stack, const SpectralParams& params) {
    Grid idx = snow_index(stack);
    const Grid& slope = stack.require(ChannelRole::SLOPE);
    Mask out = idx.like(0.0f);
    const float* pi = idx.cells.data();
    const float* ps = slope.cells.data();
    float* po = out.cells.data();
    size_t w = (size_t)idx.width;
    parallel_rows(idx.height, [&](int r0, int r1) {
        kernels::threshold_pair_less(pi + (size_t)r0 * w, params.snow_thresh,
                                     ps + (size_t)r0 * w, params.slope_max,
                                     po + (size_t)r0 * w, (size_t)(r1 - r0) * w,
                                     idx.nodata, slope.nodata, out.nodata);
    });
    return out;
}

} // namespace glacier
