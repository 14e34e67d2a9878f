#include "glacier/eval.hpp"

#include "glacier/errors.hpp"
#include "glacier/kernels.hpp"
#include "glacier/morphology.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace glacier {

namespace {

CellBox clip_box(CellBox b, int margin, int w, int h) {
    b.r0 = std::max(0, b.r0 - margin);
    b.c0 = std::max(0, b.c0 - margin);
    b.r1 = std::min(h - 1, b.r1 + margin);
    b.c1 = std::min(w - 1, b.c1 + margin);
    return b;
}

ConfusionCounts count_box(const Mask& pred, const Mask& ref, CellBox box, const Grid* dem,
                          std::optional<float> exclude_above) {
    ConfusionCounts out;
    out.bounds = box;
    const int w = pred.width;
    if (box.empty()) return out;
    if (!dem || !exclude_above) {
        kernels::ConfusionCounts acc;
        for (int r = box.r0; r <= box.r1; ++r) {
            size_t off = (size_t)r * w + box.c0;
            kernels::confusion_accumulate(pred.cells.data() + off, ref.cells.data() + off,
                                          (size_t)(box.c1 - box.c0 + 1), pred.nodata, ref.nodata,
                                          acc);
        }
        out.tp = acc.tp;
        out.tn = acc.tn;
        out.fp = acc.fp;
        out.fn = acc.fn;
        return out;
    }
    for (int r = box.r0; r <= box.r1; ++r)
        for (int c = box.c0; c <= box.c1; ++c) {
            size_t i = (size_t)r * w + c;
            float pv = pred.cells[i], rv = ref.cells[i];
            if (pred.is_nodata(pv) || ref.is_nodata(rv)) continue;
            if (!dem->is_nodata(dem->cells[i]) && dem->cells[i] > *exclude_above) continue;
            bool p = pv > 0.0f, t = rv > 0.0f;
            if (p && t)
                ++out.tp;
            else if (p && !t)
                ++out.fp;
            else if (!p && t)
                ++out.fn;
            else
                ++out.tn;
        }
    return out;
}

void append_metric(std::string& out, const std::string& prefix, const char* name,
                   const std::optional<double>& v) {
    out += prefix;
    out += '.';
    out += name;
    out += ' ';
    if (!v) {
        out += "undefined";
    } else {
        char buf[64];
        auto res = std::to_chars(buf, buf + sizeof buf, *v);
        out.append(buf, res.ptr);
    }
    out += '\n';
}

void append_block(std::string& out, const std::string& prefix, const Metrics& m) {
    append_metric(out, prefix, "iou", m.iou);
    append_metric(out, prefix, "rc", m.rc);
    append_metric(out, prefix, "pc", m.pc);
    append_metric(out, prefix, "sp", m.sp);
    append_metric(out, prefix, "fm", m.fm);
    append_metric(out, prefix, "acc", m.acc);
}

} // namespace

ConfusionCounts confusion(const Mask& pred, const Mask& ref, int margin, const Grid* dem,
                          std::optional<float> exclude_above) {
    require_aligned(pred, ref, "reference");
    if (dem) require_aligned(pred, *dem, "dem");
    if (margin < 0) throw config_error("evaluation margin must be >= 0");
    if (exclude_above && !dem)
        throw config_error("elevation-based exclusion requires an elevation grid");

    const int w = pred.width, h = pred.height;
    CellBox box{h, w, -1, -1};
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            size_t i = (size_t)r * w + c;
            bool pos = (!pred.is_nodata(pred.cells[i]) && pred.cells[i] > 0.0f) ||
                       (!ref.is_nodata(ref.cells[i]) && ref.cells[i] > 0.0f);
            if (!pos) continue;
            box.r0 = std::min(box.r0, r);
            box.c0 = std::min(box.c0, c);
            box.r1 = std::max(box.r1, r);
            box.c1 = std::max(box.c1, c);
        }
    if (box.empty()) throw structural_error("evaluation: both masks are empty");
    ConfusionCounts out = count_box(pred, ref, clip_box(box, margin, w, h), dem, exclude_above);
    if (out.total() == 0) throw structural_error("evaluation: no countable cells in bounds");
    return out;
}

Metrics metrics(const ConfusionCounts& c) {
    Metrics m;
    auto ratio = [](std::uint64_t num, std::uint64_t den) -> std::optional<double> {
        if (den == 0) return std::nullopt;
        return (double)num / (double)den;
    };
    m.iou = ratio(c.tp, c.tp + c.fp + c.fn);
    m.rc = ratio(c.tp, c.tp + c.fn);
    m.pc = ratio(c.tp, c.tp + c.fp);
    m.sp = ratio(c.tn, c.tn + c.fp);
    m.acc = ratio(c.tp + c.tn, c.total());
    if (m.pc && m.rc && (*m.pc + *m.rc) > 0.0)
        m.fm = 2.0 * *m.pc * *m.rc / (*m.pc + *m.rc);
    return m;
}

MetricsReport evaluate(const Mask& pred, const Mask& ref, int margin, const Grid* dem,
                       std::optional<float> exclude_above) {
    require_aligned(pred, ref, "reference");
    if (dem) require_aligned(pred, *dem, "dem");
    if (margin < 0) throw config_error("evaluation margin must be >= 0");
    if (exclude_above && !dem)
        throw config_error("elevation-based exclusion requires an elevation grid");

    RegionSet regions = connected_components(ref, 8);
    if (regions.regions.empty()) throw structural_error("evaluation: reference has no regions");

    MetricsReport report;
    CellBox all{pred.height, pred.width, -1, -1};
    for (const Region& reg : regions.regions) {
        CellBox box = clip_box({reg.min_r, reg.min_c, reg.max_r, reg.max_c}, margin, pred.width,
                               pred.height);
        GlacierMetrics gm;
        gm.code = reg.label;
        gm.counts = count_box(pred, ref, box, dem, exclude_above);
        gm.metrics = metrics(gm.counts);
        report.aggregate_counts.tp += gm.counts.tp;
        report.aggregate_counts.tn += gm.counts.tn;
        report.aggregate_counts.fp += gm.counts.fp;
        report.aggregate_counts.fn += gm.counts.fn;
        all.r0 = std::min(all.r0, box.r0);
        all.c0 = std::min(all.c0, box.c0);
        all.r1 = std::max(all.r1, box.r1);
        all.c1 = std::max(all.c1, box.c1);
        report.per_glacier.push_back(std::move(gm));
    }
    report.aggregate_counts.bounds = all;
    if (report.aggregate_counts.total() == 0)
        throw structural_error("evaluation: no countable cells in bounds");
    report.aggregate = metrics(report.aggregate_counts);
    return report;
}

std::string serialize(const MetricsReport& report) {
    std::string out;
    for (const GlacierMetrics& gm : report.per_glacier)
        append_block(out, "glacier_" + std::to_string(gm.code), gm.metrics);
    append_block(out, "aggregate", report.aggregate);
    return out;
}

} // namespace glacier
