#include "glacier/kernels.hpp"

#include <cmath>

namespace glacier::kernels {

// ---------------------------------------------------------------- dispatch

bool avx2_available() {
#if defined(__x86_64__) || defined(_M_X64)
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

namespace {
Backend pick_default() { return avx2_available() ? Backend::avx2 : Backend::scalar; }
Backend g_backend = pick_default();
} // namespace

Backend active_backend() { return g_backend; }

void set_backend(Backend b) {
    g_backend = (b == Backend::avx2 && !avx2_available()) ? Backend::scalar : b;
}

void reset_backend() { g_backend = pick_default(); }

MinMax minmax_valid(const float* v, size_t n, float nodata) {
    return g_backend == Backend::avx2 ? avx2::minmax_valid(v, n, nodata)
                                      : ref::minmax_valid(v, n, nodata);
}

void rescale_valid(const float* v, float* out, size_t n, float nodata,
                   float sub, float div, float out_nodata) {
    if (g_backend == Backend::avx2)
        avx2::rescale_valid(v, out, n, nodata, sub, div, out_nodata);
    else
        ref::rescale_valid(v, out, n, nodata, sub, div, out_nodata);
}

void normalized_difference(const float* a, const float* b, float* out, size_t n,
                           float a_nodata, float b_nodata, float out_nodata) {
    if (g_backend == Backend::avx2)
        avx2::normalized_difference(a, b, out, n, a_nodata, b_nodata, out_nodata);
    else
        ref::normalized_difference(a, b, out, n, a_nodata, b_nodata, out_nodata);
}

void threshold_pair_less(const float* a, float ta, const float* b, float tb,
                         float* out, size_t n,
                         float a_nodata, float b_nodata, float out_nodata) {
    if (g_backend == Backend::avx2)
        avx2::threshold_pair_less(a, ta, b, tb, out, n, a_nodata, b_nodata, out_nodata);
    else
        ref::threshold_pair_less(a, ta, b, tb, out, n, a_nodata, b_nodata, out_nodata);
}

void confusion_accumulate(const float* pred, const float* ref_m, size_t n,
                          float pred_nodata, float ref_nodata, ConfusionCounts& acc) {
    if (g_backend == Backend::avx2)
        avx2::confusion_accumulate(pred, ref_m, n, pred_nodata, ref_nodata, acc);
    else
        ref::confusion_accumulate(pred, ref_m, n, pred_nodata, ref_nodata, acc);
}

// --------------------------------------------------------------- reference

namespace ref {

namespace {
inline bool valid(float v, float nodata) { return v != nodata && !std::isnan(v); }
}

MinMax minmax_valid(const float* v, size_t n, float nodata) {
    MinMax mm;
    for (size_t i = 0; i < n; ++i) {
        float x = v[i];
        if (!valid(x, nodata)) continue;
        if (!mm.any) {
            mm.min = mm.max = x;
            mm.any = true;
        } else {
            if (x < mm.min) mm.min = x;
            if (x > mm.max) mm.max = x;
        }
    }
    return mm;
}

void rescale_valid(const float* v, float* out, size_t n, float nodata,
                   float sub, float div, float out_nodata) {
    for (size_t i = 0; i < n; ++i) {
        float x = v[i];
        out[i] = valid(x, nodata) ? (x - sub) / div : out_nodata;
    }
}

void normalized_difference(const float* a, const float* b, float* out, size_t n,
                           float a_nodata, float b_nodata, float out_nodata) {
    for (size_t i = 0; i < n; ++i) {
        float x = a[i], y = b[i];
        if (!valid(x, a_nodata) || !valid(y, b_nodata)) {
            out[i] = out_nodata;
            continue;
        }
        float den = x + y;
        out[i] = (den == 0.0f) ? out_nodata : (x - y) / den;
    }
}

void threshold_pair_less(const float* a, float ta, const float* b, float tb,
                         float* out, size_t n,
                         float a_nodata, float b_nodata, float out_nodata) {
    for (size_t i = 0; i < n; ++i) {
        float x = a[i], y = b[i];
        if (!valid(x, a_nodata) || !valid(y, b_nodata)) {
            out[i] = out_nodata;
            continue;
        }
        out[i] = (x < ta && y < tb) ? 1.0f : 0.0f;
    }
}

void confusion_accumulate(const float* pred, const float* ref_m, size_t n,
                          float pred_nodata, float ref_nodata, ConfusionCounts& acc) {
    for (size_t i = 0; i < n; ++i) {
        float p = pred[i], r = ref_m[i];
        if (!valid(p, pred_nodata) || !valid(r, ref_nodata)) continue;
        bool pp = p != 0.0f;
        bool rp = r != 0.0f;
        if (pp && rp) ++acc.tp;
        else if (pp) ++acc.fp;
        else if (rp) ++acc.fn;
        else ++acc.tn;
    }
}

} // namespace ref

} // namespace glacier::kernels
