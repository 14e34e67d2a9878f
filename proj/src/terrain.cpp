#include "glacier/terrain.hpp"

#include "glacier/errors.hpp"
#include "glacier/threading.hpp"

#include <cmath>

namespace glacier {

Grid smooth_dem(const Grid& dem, int radius) {
    if (radius < 0) throw structural_error("smoothing radius must be non-negative");
    if (radius == 0) return dem;

    int w = dem.width, h = dem.height;
    // Inclusive prefix tables, one row/col of zero padding; sums in double
    // keep the window means independent of traversal order.
    std::vector<double> vsum((size_t)(w + 1) * (h + 1), 0.0);
    std::vector<int> cnt((size_t)(w + 1) * (h + 1), 0);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            size_t i = (size_t)(r + 1) * (w + 1) + (c + 1);
            float v = dem.at(r, c);
            bool ok = !dem.is_nodata(v);
            vsum[i] = (ok ? (double)v : 0.0) + vsum[i - 1] +
                      vsum[i - (w + 1)] - vsum[i - (w + 1) - 1];
            cnt[i] = (ok ? 1 : 0) + cnt[i - 1] + cnt[i - (w + 1)] - cnt[i - (w + 1) - 1];
        }
    }

    Grid out = dem.like(0.0f);
    parallel_rows(h, [&](int r0, int r1) {
        for (int r = r0; r < r1; ++r) {
            int rt = std::max(0, r - radius), rb = std::min(h - 1, r + radius);
            for (int c = 0; c < w; ++c) {
                if (!dem.valid_at(r, c)) {
                    out.at(r, c) = dem.nodata;
                    continue;
                }
                int cl = std::max(0, c - radius), cr = std::min(w - 1, c + radius);
                auto box = [&](const auto& t) {
                    return t[(size_t)(rb + 1) * (w + 1) + (cr + 1)] -
                           t[(size_t)rt * (w + 1) + (cr + 1)] -
                           t[(size_t)(rb + 1) * (w + 1) + cl] +
                           t[(size_t)rt * (w + 1) + cl];
                };
                double s = box(vsum);
                int n = (int)box(cnt);
                out.at(r, c) = (float)(s / n);
            }
        }
    });
    return out;
}

namespace {

// Second-order surface coefficients from a full 3x3 stencil: first
// derivatives p (east) and q (north), second derivatives r2, t2, s2.
struct FitCoeffs {
    double p, q, r2, t2, s2;
};

inline bool fit3x3(const Grid& dem, int r, int c, double g, FitCoeffs& f) {
    double z[9];
    for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
            float v = dem.at(r + dr, c + dc);
            if (dem.is_nodata(v)) return false;
            z[(dr + 1) * 3 + (dc + 1)] = v;
        }
    }
    // Row 0 of the stencil is north; +y points up the grid.
    f.p = (z[2] + z[5] + z[8] - z[0] - z[3] - z[6]) / (6.0 * g);
    f.q = (z[0] + z[1] + z[2] - z[6] - z[7] - z[8]) / (6.0 * g);
    f.r2 = (z[0] + z[2] + z[3] + z[5] + z[6] + z[8] - 2.0 * (z[1] + z[4] + z[7])) / (3.0 * g * g);
    f.t2 = (z[0] + z[1] + z[2] + z[6] + z[7] + z[8] - 2.0 * (z[3] + z[4] + z[5])) / (3.0 * g * g);
    f.s2 = (z[2] + z[6] - z[0] - z[8]) / (4.0 * g * g);
    return true;
}

// Azimuth of steepest descent, radians clockwise from north; only called
// when the gradient is nonzero.
inline double aspect_of(const FitCoeffs& f) {
    double a = std::atan2(-f.p, -f.q);
    if (a < 0) a += 2.0 * M_PI;
    return a;
}

} // namespace

TerrainLayers terrain_params(const Grid& dem, const TerrainParams& params) {
    if (dem.cellsize <= 0) throw structural_error("cellsize must be positive");
    Grid smoothed = smooth_dem(dem, params.sad_radius);

    TerrainLayers out;
    out.slope = dem.like(dem.nodata);
    out.profc = dem.like(dem.nodata);
    out.tanc = dem.like(dem.nodata);
    out.unsph = dem.like(dem.nodata);
    out.sad = dem.like(dem.nodata);

    int w = dem.width, h = dem.height;
    double g = dem.cellsize;
    parallel_rows(h, [&](int r0, int r1) {
        for (int r = std::max(1, r0); r < std::min(r1, h - 1); ++r) {
            for (int c = 1; c < w - 1; ++c) {
                FitCoeffs f;
                if (!fit3x3(dem, r, c, g, f)) continue;
                double p = f.p, q = f.q, r2 = f.r2, t2 = f.t2, s2 = f.s2;
                double g2 = p * p + q * q;

                out.slope.at(r, c) = (float)(std::atan(std::sqrt(g2)) * 180.0 / M_PI);

                double m = 1.0 + g2;
                if (g2 == 0.0) {
                    out.profc.at(r, c) = 0.0f;
                    out.tanc.at(r, c) = 0.0f;
                } else {
                    out.profc.at(r, c) =
                        (float)(-(p * p * r2 + 2.0 * p * q * s2 + q * q * t2) /
                                (g2 * std::pow(m, 1.5)));
                    out.tanc.at(r, c) =
                        (float)(-(q * q * r2 - 2.0 * p * q * s2 + p * p * t2) /
                                (g2 * std::sqrt(m)));
                }

                // Half-difference of the principal curvatures via mean and
                // Gaussian curvature; analytically H^2 >= K, clamp the
                // rounding residue.
                double hm = ((1.0 + p * p) * t2 - 2.0 * p * q * s2 + (1.0 + q * q) * r2) /
                            (2.0 * std::pow(m, 1.5));
                double kg = (r2 * t2 - s2 * s2) / (m * m);
                out.unsph.at(r, c) = (float)std::sqrt(std::max(0.0, hm * hm - kg));

                FitCoeffs fs;
                if (!fit3x3(smoothed, r, c, g, fs)) continue; // sad stays nodata
                double gs2 = fs.p * fs.p + fs.q * fs.q;
                if (g2 == 0.0 || gs2 == 0.0) {
                    out.sad.at(r, c) = 0.0f;
                } else {
                    double d = std::fabs(aspect_of(f) - aspect_of(fs)) * 180.0 / M_PI;
                    if (d > 180.0) d = 360.0 - d;
                    out.sad.at(r, c) = (float)(d / 180.0);
                }
            }
        }
    });
    return out;
}

} // namespace glacier
