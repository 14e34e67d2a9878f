#include "glacier/kernels.hpp"

#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

using namespace glacier::kernels;

namespace {

const float kNodata = -9999.0f;
const float kNaN = std::numeric_limits<float>::quiet_NaN();

bool same_bits(float a, float b) {
    return std::bit_cast<std::uint32_t>(a) == std::bit_cast<std::uint32_t>(b);
}

std::vector<float> random_cells(std::mt19937& rng, size_t n) {
    std::uniform_real_distribution<float> value(-1e6f, 1e6f);
    std::uniform_real_distribution<float> coin(0.0f, 1.0f);
    std::vector<float> v(n);
    for (float& x : v) {
        float u = coin(rng);
        if (u < 0.05f)
            x = kNodata;
        else if (u < 0.1f)
            x = kNaN;
        else if (u < 0.15f)
            x = 0.0f;
        else if (u < 0.2f)
            x = 1.0f;
        else
            x = value(rng);
    }
    return v;
}

} // namespace

TEST_CASE("minmax skips nodata and NaN") {
    std::vector<float> v = {kNodata, 3.0f, kNaN, -2.0f, 7.0f};
    MinMax mm = minmax_valid(v.data(), v.size(), kNodata);
    CHECK(mm.any);
    CHECK(mm.min == -2.0f);
    CHECK(mm.max == 7.0f);
}

TEST_CASE("minmax reports when nothing is valid") {
    std::vector<float> v = {kNodata, kNaN, kNodata};
    CHECK_FALSE(minmax_valid(v.data(), v.size(), kNodata).any);
    CHECK_FALSE(minmax_valid(v.data(), 0, kNodata).any);
}

TEST_CASE("rescale maps valid cells and passes nodata through") {
    std::vector<float> v = {2.0f, kNodata, 6.0f, kNaN};
    std::vector<float> out(v.size());
    rescale_valid(v.data(), out.data(), v.size(), kNodata, 2.0f, 4.0f, kNodata);
    CHECK(out[0] == 0.0f);
    CHECK(out[1] == kNodata);
    CHECK(out[2] == 1.0f);
    CHECK(out[3] == kNodata);
}

TEST_CASE("normalized difference handles zero denominators") {
    std::vector<float> a = {0.5f, 0.3f, 0.0f, kNodata, 1.0f};
    std::vector<float> b = {0.25f, 0.3f, 0.0f, 1.0f, kNaN};
    std::vector<float> out(a.size());
    normalized_difference(a.data(), b.data(), out.data(), a.size(), kNodata, kNodata, kNodata);
    CHECK(out[0] == doctest::Approx(1.0 / 3.0));
    CHECK(out[1] == 0.0f);
    CHECK(out[2] == kNodata); // 0/0
    CHECK(out[3] == kNodata);
    CHECK(out[4] == kNodata);
}

TEST_CASE("pair threshold requires both conditions") {
    std::vector<float> a = {-0.8f, -0.8f, 0.2f, kNodata};
    std::vector<float> b = {5.0f, 30.0f, 5.0f, 5.0f};
    std::vector<float> out(a.size());
    threshold_pair_less(a.data(), -0.4f, b.data(), 24.0f, out.data(), a.size(), kNodata, kNodata,
                        kNodata);
    CHECK(out[0] == 1.0f);
    CHECK(out[1] == 0.0f);
    CHECK(out[2] == 0.0f);
    CHECK(out[3] == kNodata);
}

TEST_CASE("confusion accumulates over valid pairs only") {
    std::vector<float> pred = {1, 1, 0, 0, kNodata, 1};
    std::vector<float> ref = {1, 0, 1, 0, 1, kNaN};
    ConfusionCounts acc;
    confusion_accumulate(pred.data(), ref.data(), pred.size(), kNodata, kNodata, acc);
    CHECK(acc.tp == 1);
    CHECK(acc.fp == 1);
    CHECK(acc.fn == 1);
    CHECK(acc.tn == 1);
}

TEST_CASE("scalar and vector backends agree bit for bit") {
    if (!avx2_available()) return;
    std::mt19937 rng(7);
    std::uniform_int_distribution<size_t> len(1, 67);
    for (int trial = 0; trial < 500; ++trial) {
        size_t n = len(rng);
        std::vector<float> a = random_cells(rng, n);
        std::vector<float> b = random_cells(rng, n);

        MinMax m1 = ref::minmax_valid(a.data(), n, kNodata);
        MinMax m2 = avx2::minmax_valid(a.data(), n, kNodata);
        CHECK(m1.any == m2.any);
        if (m1.any) {
            CHECK(same_bits(m1.min, m2.min));
            CHECK(same_bits(m1.max, m2.max));
        }

        std::vector<float> o1(n), o2(n);
        ref::rescale_valid(a.data(), o1.data(), n, kNodata, 3.5f, 7.25f, kNodata);
        avx2::rescale_valid(a.data(), o2.data(), n, kNodata, 3.5f, 7.25f, kNodata);
        for (size_t i = 0; i < n; ++i) CHECK(same_bits(o1[i], o2[i]));

        ref::normalized_difference(a.data(), b.data(), o1.data(), n, kNodata, kNodata, kNodata);
        avx2::normalized_difference(a.data(), b.data(), o2.data(), n, kNodata, kNodata, kNodata);
        for (size_t i = 0; i < n; ++i) CHECK(same_bits(o1[i], o2[i]));

        ref::threshold_pair_less(a.data(), 0.25f, b.data(), 100.0f, o1.data(), n, kNodata,
                                 kNodata, kNodata);
        avx2::threshold_pair_less(a.data(), 0.25f, b.data(), 100.0f, o2.data(), n, kNodata,
                                  kNodata, kNodata);
        for (size_t i = 0; i < n; ++i) CHECK(same_bits(o1[i], o2[i]));

        ConfusionCounts c1, c2;
        ref::confusion_accumulate(a.data(), b.data(), n, kNodata, kNodata, c1);
        avx2::confusion_accumulate(a.data(), b.data(), n, kNodata, kNodata, c2);
        CHECK(c1.tp == c2.tp);
        CHECK(c1.fp == c2.fp);
        CHECK(c1.fn == c2.fn);
        CHECK(c1.tn == c2.tn);
    }
}

TEST_CASE("backend override is honored and reset restores the default") {
    Backend def = active_backend();
    set_backend(Backend::scalar);
    CHECK(active_backend() == Backend::scalar);
    reset_backend();
    CHECK(active_backend() == def);
    if (avx2_available()) CHECK(def == Backend::avx2);
}
