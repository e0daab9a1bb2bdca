#pragma once

// Local-color-table decimation. Each frame carrying an LCT is scored by its
// dissimilarity against the GCT; tables at or under the threshold are
// dropped, their index maps rewritten entry-for-entry onto the nearest GCT
// colors, and the file re-encoded. Frames already on the GCT are never
// touched.

#include <bitset>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gifdec/codec.hpp"
#include "gifdec/color.hpp"
#include "gifdec/errors.hpp"
#include "gifdec/metrics.hpp"
#include "gifdec/types.hpp"

namespace gifdec {

/// Per-frame substitution of old local indices with global ones.
struct RemapTable {
    /// Slot k holds the global index replacing local index k. The
    /// transparent slot maps to its relocated index, not its nearest color.
    std::vector<uint8_t> mapping;
    /// (old transparent index, relocated transparent index), when the frame
    /// carries transparency.
    std::optional<std::pair<uint8_t, uint8_t>> transparent_remap;
};

/// Build the remap for dropping `local` in favor of `global`. Opaque
/// entries map to their nearest global color. A transparent entry maps to
/// the smallest global index that no opaque entry targets, so no opaque
/// pixel can turn invisible; if every global index is taken this throws
/// NoFreeTransparentSlot.
inline RemapTable build_remap(const ColorTable& local, const ColorTable& global,
                              std::optional<int> transparent = {}) {
    if (global.entries.empty()) throw EmptyTable("build_remap with an empty global table");
    if (transparent && (*transparent < 0 || size_t(*transparent) >= local.size()))
        throw std::invalid_argument("transparent index outside the local table");

    RemapTable remap;
    remap.mapping.resize(local.size());
    std::bitset<256> taken;
    for (size_t k = 0; k < local.size(); ++k) {
        if (transparent && size_t(*transparent) == k) continue;
        uint8_t p = uint8_t(nearest_index(normalize(local[k]), global).index);
        remap.mapping[k] = p;
        taken.set(p);
    }
    if (transparent) {
        int slot = -1;
        for (size_t p = 0; p < global.size(); ++p)
            if (!taken.test(p)) {
                slot = int(p);
                break;
            }
        if (slot < 0)
            throw NoFreeTransparentSlot("all " + std::to_string(global.size()) +
                                        " global indices are opaque remap targets");
        remap.mapping[size_t(*transparent)] = uint8_t(slot);
        remap.transparent_remap = {uint8_t(*transparent), uint8_t(slot)};
    }
    return remap;
}

enum class FrameAction : uint8_t {
    no_lct,               ///< frame was already on the GCT; nothing to decide
    removed,              ///< LCT dropped, indices remapped
    kept,                 ///< dissimilarity above threshold
    skipped_no_gct,       ///< file has no GCT to fall back on
    skipped_transparency, ///< no free slot to relocate the transparent index
};

inline const char* to_string(FrameAction a) {
    switch (a) {
    case FrameAction::no_lct: return "no_lct";
    case FrameAction::removed: return "removed";
    case FrameAction::kept: return "kept";
    case FrameAction::skipped_no_gct: return "skipped_no_gct";
    case FrameAction::skipped_transparency: return "skipped_transparency";
    }
    return "?";
}

struct FrameOutcome {
    int frame = 0;
    bool had_lct = false;
    /// Dissimilarity against the GCT; 0 when there was nothing to measure.
    double dissimilarity = 0.0;
    FrameAction action = FrameAction::no_lct;
};

struct DecimationOutcome {
    std::vector<FrameOutcome> frames;
    int lcts_before = 0;
    int lcts_removed = 0;
};

struct OptimizationReport {
    double threshold = 0.0;
    int lcts_before = 0;
    int lcts_removed = 0;
    size_t bytes_before = 0;
    size_t bytes_after = 0;
    double bpp_before = 0.0;
    double bpp_after = 0.0;
    double saving_bpp = 0.0;
    QualityReport quality;
};

struct DecimationResult {
    GifFile gif;
    DecimationOutcome outcome;
    OptimizationReport report;
    /// The re-encoded output, so callers can write it without a second
    /// encode pass.
    std::vector<uint8_t> encoded;
};

/// Transparent slot of a frame, when transparency is switched on.
inline std::optional<int> transparent_slot(const Frame& frame) {
    if (frame.gce && frame.gce->transparency) return int(frame.gce->transparent_index);
    return std::nullopt;
}

/// Run the decimation pipeline at threshold `t`. `original_bytes` is the
/// size of the file the GifFile came from, for the rate report; when absent
/// the input is re-encoded to get a baseline. Files without a GCT pass
/// through unchanged, and a frame whose transparency cannot be relocated is
/// kept intact rather than failing the file.
inline DecimationResult decimate(const GifFile& gif, double t,
                                 std::optional<size_t> original_bytes = {}) {
    if (!(t >= 0.0 && t <= 1.0))
        throw std::invalid_argument("threshold must be in [0,1]");

    DecimationResult result;
    result.gif = gif;
    result.outcome.frames.reserve(gif.frames.size());

    for (size_t i = 0; i < gif.frames.size(); ++i) {
        Frame& frame = result.gif.frames[i];
        FrameOutcome fo;
        fo.frame = int(i);
        fo.had_lct = frame.lct.has_value();

        if (!frame.lct) {
            fo.action = gif.gct ? FrameAction::no_lct : FrameAction::skipped_no_gct;
            result.outcome.frames.push_back(fo);
            continue;
        }
        ++result.outcome.lcts_before;
        if (!gif.gct) {
            fo.action = FrameAction::skipped_no_gct;
            result.outcome.frames.push_back(fo);
            continue;
        }

        std::optional<int> transparent = transparent_slot(frame);
        try {
            fo.dissimilarity =
                table_dissimilarity(*frame.lct, *gif.gct, transparent).dissimilarity;
        } catch (const AllEntriesExcluded&) {
            // Only the invisible transparent entry exists; no color error.
            fo.dissimilarity = 0.0;
        }

        if (fo.dissimilarity > t) {
            fo.action = FrameAction::kept;
            result.outcome.frames.push_back(fo);
            continue;
        }

        RemapTable remap;
        try {
            remap = build_remap(*frame.lct, *gif.gct, transparent);
        } catch (const NoFreeTransparentSlot&) {
            fo.action = FrameAction::skipped_transparency;
            result.outcome.frames.push_back(fo);
            continue;
        }

        for (uint8_t& idx : frame.index_map) idx = remap.mapping[idx];
        if (remap.transparent_remap)
            frame.gce->transparent_index = remap.transparent_remap->second;
        frame.lct.reset();
        fo.action = FrameAction::removed;
        ++result.outcome.lcts_removed;
        result.outcome.frames.push_back(fo);
    }

    result.encoded = encode(result.gif);

    OptimizationReport& rep = result.report;
    rep.threshold = t;
    rep.lcts_before = result.outcome.lcts_before;
    rep.lcts_removed = result.outcome.lcts_removed;
    rep.bytes_before = original_bytes ? *original_bytes : encode(gif).size();
    rep.bytes_after = result.encoded.size();
    rep.bpp_before = bitrate(rep.bytes_before, gif).bpp;
    rep.bpp_after = bitrate(rep.bytes_after, result.gif).bpp;
    rep.saving_bpp = rep.bpp_before - rep.bpp_after;
    rep.quality = sequence_mse(gif, result.gif);
    return result;
}

/// Run decimate once per threshold, each pass starting from the pristine
/// input (thresholds never cascade). `thresholds` must be ascending values
/// in [0,1].
inline std::vector<std::pair<double, OptimizationReport>>
sweep(const GifFile& gif, std::span<const double> thresholds,
      std::optional<size_t> original_bytes = {}) {
    for (size_t i = 0; i < thresholds.size(); ++i) {
        if (!(thresholds[i] >= 0.0 && thresholds[i] <= 1.0))
            throw std::invalid_argument("thresholds must be in [0,1]");
        if (i > 0 && thresholds[i] < thresholds[i - 1])
            throw std::invalid_argument("thresholds must be ascending");
    }
    std::vector<std::pair<double, OptimizationReport>> rows;
    rows.reserve(thresholds.size());
    for (double t : thresholds)
        rows.emplace_back(t, decimate(gif, t, original_bytes).report);
    return rows;
}

/// The CLI's default sweep grid: 25 evenly spaced thresholds over [0,0.25].
inline std::vector<double> default_threshold_grid() {
    std::vector<double> grid;
    grid.reserve(25);
    for (int i = 0; i < 25; ++i) grid.push_back(0.25 * double(i) / 24.0);
    return grid;
}

} // namespace gifdec
