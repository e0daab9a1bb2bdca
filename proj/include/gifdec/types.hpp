#pragma once

// Domain types for decoded GIF files. A GifFile is a plain value: decoding
// never keeps a handle to the input bytes and encoding never mutates its
// argument, so instances can be copied, compared field-by-field and moved
// across threads freely.

#include <cstdint>
#include <optional>
#include <vector>

namespace gifdec {

struct Rgb {
    uint8_t r = 0;
    uint8_t g = 0;
    uint8_t b = 0;

    bool operator==(const Rgb&) const = default;
};

/// An ordered palette. Index k is positional: entry order is exactly the
/// on-file order. The codec only accepts power-of-two sizes from 2 to 256
/// (what the wire format can declare); the color metric works on any
/// non-empty table.
struct ColorTable {
    std::vector<Rgb> entries;

    ColorTable() = default;
    explicit ColorTable(std::vector<Rgb> e) : entries(std::move(e)) {}

    size_t size() const { return entries.size(); }
    const Rgb& operator[](size_t i) const { return entries[i]; }
    Rgb& operator[](size_t i) { return entries[i]; }

    /// True if this table can be written to a file as-is.
    bool encodable() const {
        size_t n = entries.size();
        return n >= 2 && n <= 256 && (n & (n - 1)) == 0;
    }

    bool operator==(const ColorTable&) const = default;
};

/// Graphic Control Extension payload (89a). The disposal field keeps the raw
/// 3-bit value so re-encoding reproduces what was read.
struct GraphicControl {
    uint16_t delay_cs = 0;
    uint8_t disposal = 0;
    bool user_input = false;
    bool transparency = false;
    uint8_t transparent_index = 0;

    bool operator==(const GraphicControl&) const = default;
};

/// An extension block kept opaque: `payload` is the verbatim byte run from
/// just after the label through the block terminator, re-emitted unchanged.
struct ExtensionBlock {
    uint8_t label = 0;
    std::vector<uint8_t> payload;

    bool operator==(const ExtensionBlock&) const = default;
};

struct Frame {
    uint16_t left = 0;
    uint16_t top = 0;
    uint16_t width = 0;
    uint16_t height = 0;
    bool interlaced = false;
    bool lct_sorted = false;
    std::optional<ColorTable> lct;
    std::optional<GraphicControl> gce;
    /// Extension blocks that appeared before this frame's image descriptor
    /// (its graphic control extension excluded), in original order.
    std::vector<ExtensionBlock> extensions;
    /// Row-major indices in natural row order, width*height entries.
    /// Interlaced frames are stored de-interlaced; the flag says how to
    /// lay rows back out on encode.
    std::vector<uint8_t> index_map;

    bool operator==(const Frame&) const = default;
};

enum class Version : uint8_t { gif87a, gif89a };

struct LogicalScreen {
    uint16_t width = 0;
    uint16_t height = 0;
    uint8_t background_index = 0;
    uint8_t pixel_aspect = 0;
    uint8_t color_resolution = 7; // raw 3-bit field, round-tripped
    bool gct_sorted = false;

    bool operator==(const LogicalScreen&) const = default;
};

struct GifFile {
    Version version = Version::gif89a;
    LogicalScreen screen;
    std::optional<ColorTable> gct;
    /// From the looping application extension; 0 means loop forever.
    std::optional<uint16_t> loop_count;
    std::vector<Frame> frames;
    /// Extension blocks between the last frame and the trailer.
    std::vector<ExtensionBlock> trailing_extensions;

    bool operator==(const GifFile&) const = default;
};

/// Table a frame's indices resolve against: its LCT if present, else the
/// file's GCT, else null.
inline const ColorTable* active_table(const GifFile& gif, const Frame& frame) {
    if (frame.lct) return &*frame.lct;
    if (gif.gct) return &*gif.gct;
    return nullptr;
}

} // namespace gifdec
