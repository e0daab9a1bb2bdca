#pragma once

// Quality and rate measurement. Frames render per the indexed model
// F(x) = T(I(x)) over their own rectangle, with no cross-frame disposal
// compositing; transparent pixels carry no color and drop out of the MSE
// denominator.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "gifdec/color.hpp"
#include "gifdec/errors.hpp"
#include "gifdec/types.hpp"

namespace gifdec {

struct QualityReport {
    double mse_avg = 0.0;
    double mse_max = 0.0;
    /// 10*log10(1/MSE) with S=1; +infinity when the MSE is 0.
    double psnr_avg = std::numeric_limits<double>::infinity();
    /// PSNR computed from mse_max.
    double psnr_max_err = std::numeric_limits<double>::infinity();
    std::vector<double> per_frame_mse;
};

struct RateReport {
    size_t bytes = 0;
    double bpp = 0.0;
    double saving_bpp = 0.0;
};

inline double psnr_from_mse(double mse) {
    if (mse <= 0.0) return std::numeric_limits<double>::infinity();
    return -10.0 * std::log10(mse);
}

inline bool is_transparent(const Frame& frame, uint8_t index) {
    return frame.gce && frame.gce->transparency && frame.gce->transparent_index == index;
}

/// Mean squared channel difference between two frames rendered through
/// their tables, in normalized [0,1] space. Pixels transparent in either
/// frame contribute nothing and are excluded from the count.
inline double frame_mse(const Frame& a, const ColorTable& table_a, const Frame& b,
                        const ColorTable& table_b) {
    if (a.width != b.width || a.height != b.height || a.left != b.left || a.top != b.top)
        throw GeometryMismatch("frames cover different rectangles");

    double sum = 0.0;
    size_t counted = 0;
    for (size_t i = 0; i < a.index_map.size(); ++i) {
        uint8_t ia = a.index_map[i];
        uint8_t ib = b.index_map[i];
        if (is_transparent(a, ia) || is_transparent(b, ib)) continue;
        if (ia >= table_a.size() || ib >= table_b.size())
            throw OversizedIndex("pixel index outside its table during MSE");
        NormColor ca = normalize(table_a[ia]);
        NormColor cb = normalize(table_b[ib]);
        double dr = ca.r - cb.r;
        double dg = ca.g - cb.g;
        double db = ca.b - cb.b;
        sum += dr * dr + dg * dg + db * db;
        ++counted;
    }
    if (counted == 0) return 0.0;
    return sum / (3.0 * double(counted));
}

/// Per-frame MSE between two decoded files plus the sequence aggregates
/// (average and maximum) and their PSNR values.
inline QualityReport sequence_mse(const GifFile& orig, const GifFile& opt) {
    if (orig.frames.size() != opt.frames.size())
        throw FrameCountMismatch("frame counts differ: " + std::to_string(orig.frames.size()) +
                                 " vs " + std::to_string(opt.frames.size()));

    QualityReport report;
    report.per_frame_mse.reserve(orig.frames.size());
    for (size_t i = 0; i < orig.frames.size(); ++i) {
        const ColorTable* ta = active_table(orig, orig.frames[i]);
        const ColorTable* tb = active_table(opt, opt.frames[i]);
        if (!ta || !tb)
            throw InvariantViolation("frame " + std::to_string(i) + " has no color table");
        report.per_frame_mse.push_back(frame_mse(orig.frames[i], *ta, opt.frames[i], *tb));
    }

    double sum = 0.0;
    double max = 0.0;
    for (double m : report.per_frame_mse) {
        sum += m;
        if (m > max) max = m;
    }
    report.mse_avg = report.per_frame_mse.empty() ? 0.0 : sum / double(report.per_frame_mse.size());
    report.mse_max = max;
    report.psnr_avg = psnr_from_mse(report.mse_avg);
    report.psnr_max_err = psnr_from_mse(report.mse_max);
    return report;
}

/// Bit rate of an encoded file: 8*bytes over logical-screen pixels times
/// frame count.
inline RateReport bitrate(size_t byte_count, const GifFile& gif) {
    if (gif.frames.empty()) throw std::invalid_argument("bitrate of a file with no frames");
    double denom = double(gif.screen.width) * double(gif.screen.height) *
                   double(gif.frames.size());
    return RateReport{byte_count, 8.0 * double(byte_count) / denom, 0.0};
}

/// A frame rendered to RGB with an opacity mask, for pixel-level checks.
struct RenderedFrame {
    uint16_t width = 0;
    uint16_t height = 0;
    std::vector<Rgb> pixels;
    std::vector<uint8_t> opaque;
};

inline RenderedFrame render(const Frame& frame, const ColorTable& table) {
    RenderedFrame out;
    out.width = frame.width;
    out.height = frame.height;
    out.pixels.resize(frame.index_map.size());
    out.opaque.resize(frame.index_map.size());
    for (size_t i = 0; i < frame.index_map.size(); ++i) {
        uint8_t idx = frame.index_map[i];
        if (idx >= table.size()) throw OversizedIndex("pixel index outside its table in render");
        out.pixels[i] = table[idx];
        out.opaque[i] = is_transparent(frame, idx) ? 0 : 1;
    }
    return out;
}

} // namespace gifdec
