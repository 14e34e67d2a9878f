#pragma once

#include <cstddef>
#include <cstdint>

// Flat per-cell arithmetic used by the raster operators. Every kernel has a
// scalar reference implementation and an AVX2 variant; the top-level entry
// points pick one at runtime. Both paths use only correctly-rounded IEEE
// operations (compare/min/max/add/sub/div) so their outputs are bit-identical,
// which the equivalence tests assert.

namespace glacier::kernels {

struct MinMax {
    float min = 0.0f;
    float max = 0.0f;
    bool any = false; // false when every cell was nodata
};

struct ConfusionCounts {
    long long tp = 0;
    long long fp = 0;
    long long fn = 0;
    long long tn = 0;
};

enum class Backend { scalar, avx2 };

bool avx2_available();

// Active backend defaults to the best the CPU supports. Overridable for
// tests; setting avx2 on a CPU without it falls back to scalar.
Backend active_backend();
void set_backend(Backend b);
void reset_backend();

// min/max over cells that are neither `nodata` nor NaN.
MinMax minmax_valid(const float* v, size_t n, float nodata);

// out[i] = (v[i] - sub) / div for valid cells, out_nodata otherwise.
// div must be nonzero.
void rescale_valid(const float* v, float* out, size_t n, float nodata,
                   float sub, float div, float out_nodata);

// out[i] = (a[i] - b[i]) / (a[i] + b[i]); out_nodata when either input is
// missing or the denominator is exactly zero.
void normalized_difference(const float* a, const float* b, float* out, size_t n,
                           float a_nodata, float b_nodata, float out_nodata);

// out[i] = 1 when a[i] < ta and b[i] < tb, 0 otherwise; out_nodata when
// either input is missing.
void threshold_pair_less(const float* a, float ta, const float* b, float tb,
                         float* out, size_t n,
                         float a_nodata, float b_nodata, float out_nodata);

// Confusion tallies over aligned binary rows; cells where either side is
// missing are skipped. Values other than 0 are treated as positive.
void confusion_accumulate(const float* pred, const float* ref, size_t n,
                          float pred_nodata, float ref_nodata, ConfusionCounts& acc);

// Reference (scalar) implementations, callable directly by tests.
namespace ref {
MinMax minmax_valid(const float* v, size_t n, float nodata);
void rescale_valid(const float* v, float* out, size_t n, float nodata,
                   float sub, float div, float out_nodata);
void normalized_difference(const float* a, const float* b, float* out, size_t n,
                           float a_nodata, float b_nodata, float out_nodata);
void threshold_pair_less(const float* a, float ta, const float* b, float tb,
                         float* out, size_t n,
                         float a_nodata, float b_nodata, float out_nodata);
void confusion_accumulate(const float* pred, const float* ref, size_t n,
                          float pred_nodata, float ref_nodata, ConfusionCounts& acc);
} // namespace ref

// AVX2 implementations; call only when avx2_available() is true.
namespace avx2 {
MinMax minmax_valid(const float* v, size_t n, float nodata);
void rescale_valid(const float* v, float* out, size_t n, float nodata,
                   float sub, float div, float out_nodata);
void normalized_difference(const float* a, const float* b, float* out, size_t n,
                           float a_nodata, float b_nodata, float out_nodata);
void threshold_pair_less(const float* a, float ta, const float* b, float tb,
                         float* out, size_t n,
                         float a_nodata, float b_nodata, float out_nodata);
void confusion_accumulate(const float* pred, const float* ref, size_t n,
                          float pred_nodata, float ref_nodata, ConfusionCounts& acc);
} // namespace avx2

} // namespace glacier::kernels
