#pragma once

// Deterministic synthetic animated GIFs with controlled local-table counts
// and controlled color overlap against the global table. Drives the test
// corpus and the gen-corpus CLI subcommand; the same seed always yields the
// same files. Raw engine draws are used instead of <random> distributions
// so output does not depend on the standard library build.

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "gifdec/types.hpp"

namespace gifdec::synth {

inline uint32_t rand_below(std::mt19937& rng, uint32_t n) { return rng() % n; }

inline int rand_int(std::mt19937& rng, int lo, int hi) {
    return lo + int(rand_below(rng, uint32_t(hi - lo + 1)));
}

inline double rand_real(std::mt19937& rng) {
    return double(rng() >> 6) / double(1u << 26);
}

inline bool chance(std::mt19937& rng, double p) { return rand_real(rng) < p; }

enum class SynthProfile {
    /// Duplicate, near-duplicate and unrelated LCTs mixed together.
    mixed,
    /// Every LCT is an exact copy or permutation of the GCT, so a zero
    /// threshold removes all of them without touching a pixel.
    lossless,
    /// Only near-duplicate LCTs, noise levels spread per file.
    near,
};

struct SynthOptions {
    SynthProfile profile = SynthProfile::mixed;
    int min_frames = 2;
    int max_frames = 12;
    uint16_t min_dim = 24;
    uint16_t max_dim = 80;
    std::vector<int> gct_sizes = {16, 32, 64, 128, 256};
    /// Local tables get the global table's size, which keeps the LZW
    /// minimum code size stable across decimation. Switch off to exercise
    /// code-size changes.
    bool lct_matches_gct_size = true;
    bool allow_transparency = true;
    bool allow_interlace = true;
    bool allow_comments = true;
};

namespace detail {

/// Random colors, pairwise distinct, channels confined to [lo,hi] so that
/// colors outside the cube are measurably far from every table entry.
inline ColorTable random_table(std::mt19937& rng, int n, int lo, int hi) {
    ColorTable table;
    table.entries.reserve(size_t(n));
    while (int(table.entries.size()) < n) {
        Rgb c{uint8_t(rand_int(rng, lo, hi)), uint8_t(rand_int(rng, lo, hi)),
              uint8_t(rand_int(rng, lo, hi))};
        bool dup = false;
        for (const Rgb& e : table.entries)
            if (e == c) {
                dup = true;
                break;
            }
        if (!dup) table.entries.push_back(c);
    }
    return table;
}

inline uint8_t clamp_channel(int v) { return uint8_t(std::clamp(v, 0, 255)); }

inline std::vector<uint8_t> pattern(std::mt19937& rng, uint16_t w, uint16_t h, int n_colors) {
    std::vector<uint8_t> px(size_t(w) * h);
    int style = rand_int(rng, 0, 3);
    int a = rand_int(rng, 1, 7);
    int b = rand_int(rng, 1, 7);
    int bx = rand_int(rng, 2, 9);
    int by = rand_int(rng, 2, 9);
    int phase = rand_int(rng, 0, n_colors - 1);
    int cx = rand_int(rng, 0, w - 1);
    int cy = rand_int(rng, 0, h - 1);

    if (style == 3) {
        // run-length texture
        size_t i = 0;
        while (i < px.size()) {
            uint8_t v = uint8_t(rand_below(rng, uint32_t(n_colors)));
            size_t run = 1 + rand_below(rng, 24);
            for (size_t j = 0; j < run && i < px.size(); ++j) px[i++] = v;
        }
    } else {
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                int v;
                if (style == 0)
                    v = x / bx + (y / by) * 3 + phase;
                else if (style == 1)
                    v = (x * a + y * b) / (a + b) + phase;
                else {
                    int dx = x - cx;
                    int dy = y - cy;
                    v = (dx * dx + dy * dy) / (4 * (a + b)) + phase;
                }
                px[size_t(y) * w + x] = uint8_t(v % n_colors);
            }
    }
    // speckle
    size_t n_spots = px.size() / 16;
    for (size_t s = 0; s < n_spots; ++s)
        px[rand_below(rng, uint32_t(px.size()))] = uint8_t(rand_below(rng, uint32_t(n_colors)));
    return px;
}

enum class LctKind { duplicate, permuted, near, far };

inline Rgb far_color(std::mt19937& rng) {
    // Opposite corner of the color cube from random_table's range.
    return Rgb{uint8_t(rand_int(rng, 216, 255)), uint8_t(rand_int(rng, 216, 255)),
               uint8_t(rand_int(rng, 216, 255))};
}

/// `noise_amp` perturbs channels of near tables; `far_fraction` swaps that
/// share of near entries for colors far from the whole GCT, which lifts the
/// dissimilarity beyond what channel noise alone reaches against dense
/// tables.
inline ColorTable make_lct(std::mt19937& rng, const ColorTable& gct, LctKind kind,
                           int noise_amp, double far_fraction = 0.0) {
    ColorTable lct = gct;
    switch (kind) {
    case LctKind::duplicate:
        break;
    case LctKind::permuted:
        for (size_t i = lct.size(); i > 1; --i)
            std::swap(lct.entries[i - 1], lct.entries[rand_below(rng, uint32_t(i))]);
        break;
    case LctKind::near:
        for (Rgb& c : lct.entries) {
            if (far_fraction > 0.0 && rand_real(rng) < far_fraction) {
                c = far_color(rng);
            } else {
                c.r = clamp_channel(c.r + rand_int(rng, -noise_amp, noise_amp));
                c.g = clamp_channel(c.g + rand_int(rng, -noise_amp, noise_amp));
                c.b = clamp_channel(c.b + rand_int(rng, -noise_amp, noise_amp));
            }
        }
        break;
    case LctKind::far:
        for (Rgb& c : lct.entries) c = far_color(rng);
        break;
    }
    return lct;
}

} // namespace detail

/// One synthetic animated GIF.
inline GifFile synth_gif(std::mt19937& rng, const SynthOptions& opt = {}) {
    GifFile gif;
    gif.screen.width = uint16_t(rand_int(rng, opt.min_dim, opt.max_dim));
    gif.screen.height = uint16_t(rand_int(rng, opt.min_dim, opt.max_dim));

    int gct_size = opt.gct_sizes[rand_below(rng, uint32_t(opt.gct_sizes.size()))];
    // Keep global colors inside [0,160] so far tables land measurably away.
    gif.gct = detail::random_table(rng, gct_size, 0, 160);

    int n_frames = rand_int(rng, opt.min_frames, opt.max_frames);
    bool plain_87a = opt.profile == SynthProfile::mixed && chance(rng, 0.1);
    if (!plain_87a) gif.loop_count = chance(rng, 0.8) ? uint16_t(0) : uint16_t(rand_int(rng, 1, 5));
    gif.version = plain_87a ? Version::gif87a : Version::gif89a;

    // Per-file character plus per-frame spread keeps the corpus-wide
    // dissimilarity distribution dense over the thresholds that matter.
    int per_file_amp = rand_int(rng, 20, 200);
    double per_file_far = 0.2 + 0.4 * rand_real(rng);
    bool any_lct = false;

    for (int i = 0; i < n_frames; ++i) {
        Frame frame;
        if (i == 0 || chance(rng, 0.7)) {
            frame.width = gif.screen.width;
            frame.height = gif.screen.height;
        } else {
            frame.width = uint16_t(rand_int(rng, 8, gif.screen.width));
            frame.height = uint16_t(rand_int(rng, 8, gif.screen.height));
            frame.left = uint16_t(rand_int(rng, 0, gif.screen.width - frame.width));
            frame.top = uint16_t(rand_int(rng, 0, gif.screen.height - frame.height));
        }

        bool want_lct = chance(rng, opt.profile == SynthProfile::lossless ? 0.8 : 0.7);
        if (i == n_frames - 1 && !any_lct) want_lct = true;
        if (want_lct) {
            detail::LctKind kind;
            double roll = rand_real(rng);
            switch (opt.profile) {
            case SynthProfile::lossless:
                kind = roll < 0.5 ? detail::LctKind::duplicate : detail::LctKind::permuted;
                break;
            case SynthProfile::near:
                kind = detail::LctKind::near;
                break;
            default:
                kind = roll < 0.15   ? detail::LctKind::duplicate
                       : roll < 0.25 ? detail::LctKind::permuted
                       : roll < 0.70 ? detail::LctKind::near
                                     : detail::LctKind::far;
            }
            int amp = rand_int(rng, 3, per_file_amp);
            double far_frac = chance(rng, 0.6) ? 0.0 : per_file_far * rand_real(rng);
            ColorTable lct = detail::make_lct(rng, *gif.gct, kind, amp, far_frac);
            if (!opt.lct_matches_gct_size && lct.size() > 2 && chance(rng, 0.5)) {
                size_t n = lct.size();
                while (n > 2 && chance(rng, 0.5)) n /= 2;
                lct.entries.resize(n);
            }
            frame.lct = std::move(lct);
            any_lct = true;
        }

        size_t table_size = frame.lct ? frame.lct->size() : gif.gct->size();
        frame.index_map = detail::pattern(rng, frame.width, frame.height, int(table_size));
        frame.interlaced = opt.allow_interlace && chance(rng, 0.15);

        if (!plain_87a) {
            GraphicControl gce;
            gce.delay_cs = uint16_t(rand_int(rng, 2, 12));
            gce.disposal = uint8_t(rand_int(rng, 0, 3));
            if (opt.allow_transparency && chance(rng, 0.25)) {
                gce.transparency = true;
                gce.transparent_index = uint8_t(rand_below(rng, uint32_t(table_size)));
            }
            frame.gce = gce;
        }

        if (!plain_87a && opt.allow_comments && chance(rng, 0.1)) {
            ExtensionBlock comment;
            comment.label = 0xFE;
            int len = rand_int(rng, 1, 16);
            comment.payload.push_back(uint8_t(len));
            for (int c = 0; c < len; ++c)
                comment.payload.push_back(uint8_t('a' + rand_below(rng, 26)));
            comment.payload.push_back(0);
            frame.extensions.push_back(std::move(comment));
        }

        gif.frames.push_back(std::move(frame));
    }
    return gif;
}

/// A corpus of `count` files. File i depends only on (seed, i), so corpora
/// are reproducible and extendable.
inline std::vector<GifFile> make_corpus(uint32_t seed, int count, const SynthOptions& opt = {}) {
    std::vector<GifFile> corpus;
    corpus.reserve(size_t(count));
    for (int i = 0; i < count; ++i) {
        std::mt19937 rng(seed * 1000003u + uint32_t(i) * 7919u + 17u);
        corpus.push_back(synth_gif(rng, opt));
    }
    return corpus;
}

} // namespace gifdec::synth
