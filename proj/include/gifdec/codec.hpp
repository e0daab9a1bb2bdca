#pragma once

// Bit-exact GIF87a/89a container parsing and serialization. decode() and
// encode() are pure functions of their arguments; round-tripping a decoded
// file reproduces it structurally (LZW bytes may differ since encodings are
// not unique, but a further decode yields an equal GifFile).

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "gifdec/errors.hpp"
#include "gifdec/lzw.hpp"
#include "gifdec/types.hpp"

namespace gifdec {

namespace detail {

struct ByteReader {
    std::span<const uint8_t> data;
    size_t pos = 0;

    size_t remaining() const { return data.size() - pos; }

    void require(size_t n, const char* what) {
        if (remaining() < n)
            throw TruncatedFile(std::string("unexpected end of file while reading ") + what);
    }

    uint8_t u8(const char* what) {
        require(1, what);
        return data[pos++];
    }

    uint16_t u16le(const char* what) {
        require(2, what);
        uint16_t v = uint16_t(data[pos] | (data[pos + 1] << 8));
        pos += 2;
        return v;
    }

    void copy(std::vector<uint8_t>& out, size_t n, const char* what) {
        require(n, what);
        out.insert(out.end(), data.begin() + long(pos), data.begin() + long(pos + n));
        pos += n;
    }
};

struct ByteWriter {
    std::vector<uint8_t> bytes;

    void u8(uint8_t v) { bytes.push_back(v); }
    void u16le(uint16_t v) {
        bytes.push_back(uint8_t(v & 0xFF));
        bytes.push_back(uint8_t(v >> 8));
    }
    void raw(std::span<const uint8_t> d) { bytes.insert(bytes.end(), d.begin(), d.end()); }
};

// Natural row index of each stored row, in storage order, for the four
// interlace passes.
inline std::vector<uint16_t> interlace_row_order(uint16_t height) {
    static constexpr int kStart[4] = {0, 4, 2, 1};
    static constexpr int kStep[4] = {8, 8, 4, 2};
    std::vector<uint16_t> rows;
    rows.reserve(height);
    for (int pass = 0; pass < 4; ++pass)
        for (int r = kStart[pass]; r < int(height); r += kStep[pass])
            rows.push_back(uint16_t(r));
    return rows;
}

inline std::vector<uint8_t> deinterlace(std::span<const uint8_t> stored, uint16_t width,
                                        uint16_t height) {
    std::vector<uint8_t> natural(stored.size());
    auto order = interlace_row_order(height);
    for (size_t i = 0; i < order.size(); ++i)
        std::memcpy(natural.data() + size_t(order[i]) * width, stored.data() + i * width, width);
    return natural;
}

inline std::vector<uint8_t> reinterlace(std::span<const uint8_t> natural, uint16_t width,
                                        uint16_t height) {
    std::vector<uint8_t> stored(natural.size());
    auto order = interlace_row_order(height);
    for (size_t i = 0; i < order.size(); ++i)
        std::memcpy(stored.data() + i * width, natural.data() + size_t(order[i]) * width, width);
    return stored;
}

inline ColorTable read_color_table(ByteReader& r, size_t n_entries) {
    r.require(n_entries * 3, "color table");
    ColorTable table;
    table.entries.reserve(n_entries);
    for (size_t i = 0; i < n_entries; ++i) {
        Rgb c{r.data[r.pos], r.data[r.pos + 1], r.data[r.pos + 2]};
        r.pos += 3;
        table.entries.push_back(c);
    }
    return table;
}

/// Concatenated payload of a sub-block chain, terminator consumed.
inline std::vector<uint8_t> read_sub_blocks(ByteReader& r) {
    std::vector<uint8_t> out;
    for (;;) {
        uint8_t n = r.u8("sub-block length");
        if (n == 0) break;
        r.copy(out, n, "sub-block data");
    }
    return out;
}

/// Verbatim sub-block chain including length bytes and the terminator.
inline std::vector<uint8_t> read_raw_sub_blocks(ByteReader& r) {
    std::vector<uint8_t> out;
    for (;;) {
        uint8_t n = r.u8("sub-block length");
        out.push_back(n);
        if (n == 0) break;
        r.copy(out, n, "sub-block data");
    }
    return out;
}

inline void write_sub_blocks(ByteWriter& w, std::span<const uint8_t> payload) {
    size_t pos = 0;
    while (pos < payload.size()) {
        size_t n = std::min<size_t>(255, payload.size() - pos);
        w.u8(uint8_t(n));
        w.raw(payload.subspan(pos, n));
        pos += n;
    }
    w.u8(0);
}

// log2 of a power-of-two table size, as the size field of a packed byte.
inline uint8_t table_size_field(size_t n_entries) {
    uint8_t bits = 0;
    while ((size_t(2) << bits) < n_entries) ++bits;
    return bits;
}

inline int min_code_size_for(size_t table_size) {
    int bits = 1;
    while ((size_t(1) << bits) < table_size) ++bits;
    return std::max(2, bits);
}

} // namespace detail

inline constexpr uint8_t kBlockExtension = 0x21;
inline constexpr uint8_t kBlockImage = 0x2C;
inline constexpr uint8_t kBlockTrailer = 0x3B;
inline constexpr uint8_t kExtGraphicControl = 0xF9;
inline constexpr uint8_t kExtApplication = 0xFF;

/// Decode a complete GIF byte stream. Index maps come back LZW-decompressed
/// with interlaced rows reordered to natural order; unknown extensions are
/// preserved verbatim for re-emission.
inline GifFile decode(std::span<const uint8_t> bytes) {
    static constexpr char kMagic87[] = "GIF87a";
    static constexpr char kMagic89[] = "GIF89a";

    GifFile gif;
    if (bytes.size() >= 6 && std::memcmp(bytes.data(), kMagic87, 6) == 0)
        gif.version = Version::gif87a;
    else if (bytes.size() >= 6 && std::memcmp(bytes.data(), kMagic89, 6) == 0)
        gif.version = Version::gif89a;
    else
        throw BadMagic("input does not start with a GIF87a/GIF89a signature");

    detail::ByteReader r{bytes, 6};

    gif.screen.width = r.u16le("logical screen width");
    gif.screen.height = r.u16le("logical screen height");
    if (gif.screen.width == 0 || gif.screen.height == 0)
        throw InvariantViolation("logical screen dimensions must be at least 1x1");
    uint8_t packed = r.u8("logical screen flags");
    gif.screen.color_resolution = (packed >> 4) & 0x07;
    gif.screen.gct_sorted = (packed & 0x08) != 0;
    gif.screen.background_index = r.u8("background color index");
    gif.screen.pixel_aspect = r.u8("pixel aspect ratio");
    if (packed & 0x80) gif.gct = detail::read_color_table(r, size_t(2) << (packed & 0x07));

    std::optional<GraphicControl> pending_gce;
    std::vector<ExtensionBlock> pending_ext;
    bool saw_trailer = false;

    while (!saw_trailer) {
        uint8_t block = r.u8("block introducer");
        switch (block) {
        case kBlockTrailer:
            saw_trailer = true;
            break;

        case kBlockExtension: {
            uint8_t label = r.u8("extension label");
            if (label == kExtGraphicControl) {
                auto payload = detail::read_sub_blocks(r);
                if (payload.size() < 4)
                    throw TruncatedFile("graphic control extension shorter than 4 bytes");
                GraphicControl gce;
                gce.disposal = (payload[0] >> 2) & 0x07;
                gce.user_input = (payload[0] & 0x02) != 0;
                gce.transparency = (payload[0] & 0x01) != 0;
                gce.delay_cs = uint16_t(payload[1] | (payload[2] << 8));
                gce.transparent_index = payload[3];
                pending_gce = gce;
            } else if (label == kExtApplication) {
                auto raw = detail::read_raw_sub_blocks(r);
                // Looping extension: 11-byte app id, then sub-block 01 lo hi.
                bool is_loop = raw.size() >= 16 && raw[0] == 11 &&
                               (std::memcmp(raw.data() + 1, "NETSCAPE2.0", 11) == 0 ||
                                std::memcmp(raw.data() + 1, "ANIMEXTS1.0", 11) == 0) &&
                               raw[12] >= 3 && raw[13] == 0x01;
                if (is_loop)
                    gif.loop_count = uint16_t(raw[14] | (raw[15] << 8));
                else
                    pending_ext.push_back({label, std::move(raw)});
            } else {
                pending_ext.push_back({label, detail::read_raw_sub_blocks(r)});
            }
            break;
        }

        case kBlockImage: {
            Frame frame;
            frame.left = r.u16le("frame left");
            frame.top = r.u16le("frame top");
            frame.width = r.u16le("frame width");
            frame.height = r.u16le("frame height");
            if (frame.width == 0 || frame.height == 0)
                throw InvariantViolation("frame dimensions must be at least 1x1");
            if (frame.left + uint32_t(frame.width) > gif.screen.width ||
                frame.top + uint32_t(frame.height) > gif.screen.height)
                throw InvariantViolation("frame rectangle exceeds the logical screen");
            uint8_t fpacked = r.u8("image descriptor flags");
            frame.interlaced = (fpacked & 0x40) != 0;
            frame.lct_sorted = (fpacked & 0x20) != 0;
            if (fpacked & 0x80)
                frame.lct = detail::read_color_table(r, size_t(2) << (fpacked & 0x07));

            int min_code_size = r.u8("LZW minimum code size");
            auto compressed = detail::read_sub_blocks(r);
            auto indices = lzw::decompress(min_code_size, compressed);
            size_t n_pixels = size_t(frame.width) * frame.height;
            if (indices.size() < n_pixels)
                throw CorruptLzwStream("pixel data ended after " +
                                       std::to_string(indices.size()) + " of " +
                                       std::to_string(n_pixels) + " indices");
            indices.resize(n_pixels);

            frame.gce = pending_gce;
            frame.extensions = std::move(pending_ext);
            pending_gce.reset();
            pending_ext.clear();

            const ColorTable* table = frame.lct ? &*frame.lct : (gif.gct ? &*gif.gct : nullptr);
            if (table) {
                for (uint8_t idx : indices)
                    if (idx >= table->size())
                        throw OversizedIndex("pixel index " + std::to_string(int(idx)) +
                                             " outside a " + std::to_string(table->size()) +
                                             "-entry table in frame " +
                                             std::to_string(gif.frames.size()));
                if (frame.gce && frame.gce->transparency &&
                    frame.gce->transparent_index >= table->size()) {
                    // Some encoders emit a transparent index beyond the
                    // table. No pixel can reference it, so nothing was
                    // transparent; drop the flag rather than the file.
                    frame.gce->transparency = false;
                }
            }

            frame.index_map = frame.interlaced
                                  ? detail::deinterlace(indices, frame.width, frame.height)
                                  : std::move(indices);
            gif.frames.push_back(std::move(frame));
            break;
        }

        default:
            throw UnexpectedBlock("unknown block introducer byte " + std::to_string(int(block)));
        }
    }

    gif.trailing_extensions = std::move(pending_ext);
    return gif;
}

inline GifFile decode(const std::vector<uint8_t>& bytes) {
    return decode(std::span<const uint8_t>(bytes));
}

namespace detail {

inline void validate_for_encode(const GifFile& gif) {
    if (gif.screen.width == 0 || gif.screen.height == 0)
        throw InvariantViolation("logical screen dimensions must be at least 1x1");
    if (gif.gct && !gif.gct->encodable())
        throw InvariantViolation("global color table size " + std::to_string(gif.gct->size()) +
                                 " is not a power of two in [2,256]");
    for (size_t i = 0; i < gif.frames.size(); ++i) {
        const Frame& f = gif.frames[i];
        std::string where = " in frame " + std::to_string(i);
        if (f.width == 0 || f.height == 0)
            throw InvariantViolation("frame dimensions must be at least 1x1" + where);
        if (f.left + uint32_t(f.width) > gif.screen.width ||
            f.top + uint32_t(f.height) > gif.screen.height)
            throw InvariantViolation("frame rectangle exceeds the logical screen" + where);
        if (f.lct && !f.lct->encodable())
            throw InvariantViolation("local color table size " + std::to_string(f.lct->size()) +
                                     " is not a power of two in [2,256]" + where);
        if (f.index_map.size() != size_t(f.width) * f.height)
            throw InvariantViolation("index map size does not match frame dimensions" + where);
        const ColorTable* table = active_table(gif, f);
        if (table) {
            for (uint8_t idx : f.index_map)
                if (idx >= table->size())
                    throw InvariantViolation("pixel index " + std::to_string(int(idx)) +
                                             " outside the active table" + where);
            if (f.gce && f.gce->transparency && f.gce->transparent_index >= table->size())
                throw InvariantViolation("transparent index outside the active table" + where);
        }
    }
}

inline void write_extension(ByteWriter& w, const ExtensionBlock& ext) {
    w.u8(kBlockExtension);
    w.u8(ext.label);
    w.raw(ext.payload);
}

} // namespace detail

/// Serialize a GifFile to a standards-compliant byte stream. The version
/// is bumped to 89a whenever an 89a-only block is present.
inline std::vector<uint8_t> encode(const GifFile& gif) {
    detail::validate_for_encode(gif);

    bool has_89a_blocks = gif.loop_count.has_value() || !gif.trailing_extensions.empty();
    for (const Frame& f : gif.frames)
        if (f.gce || !f.extensions.empty()) has_89a_blocks = true;
    bool write_89a = has_89a_blocks || gif.version == Version::gif89a;

    detail::ByteWriter w;
    const char* magic = write_89a ? "GIF89a" : "GIF87a";
    w.raw(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(magic), 6));

    w.u16le(gif.screen.width);
    w.u16le(gif.screen.height);
    uint8_t packed = uint8_t((gif.screen.color_resolution & 0x07) << 4);
    if (gif.screen.gct_sorted) packed |= 0x08;
    if (gif.gct) packed |= 0x80 | detail::table_size_field(gif.gct->size());
    w.u8(packed);
    w.u8(gif.screen.background_index);
    w.u8(gif.screen.pixel_aspect);
    if (gif.gct)
        for (const Rgb& c : gif.gct->entries) {
            w.u8(c.r);
            w.u8(c.g);
            w.u8(c.b);
        }

    if (gif.loop_count) {
        w.u8(kBlockExtension);
        w.u8(kExtApplication);
        w.u8(11);
        const char* app = "NETSCAPE2.0";
        w.raw(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(app), 11));
        w.u8(3);
        w.u8(0x01);
        w.u16le(*gif.loop_count);
        w.u8(0);
    }

    for (const Frame& f : gif.frames) {
        for (const ExtensionBlock& ext : f.extensions) detail::write_extension(w, ext);

        if (f.gce) {
            w.u8(kBlockExtension);
            w.u8(kExtGraphicControl);
            w.u8(4);
            uint8_t gpacked = uint8_t((f.gce->disposal & 0x07) << 2);
            if (f.gce->user_input) gpacked |= 0x02;
            if (f.gce->transparency) gpacked |= 0x01;
            w.u8(gpacked);
            w.u16le(f.gce->delay_cs);
            w.u8(f.gce->transparent_index);
            w.u8(0);
        }

        w.u8(kBlockImage);
        w.u16le(f.left);
        w.u16le(f.top);
        w.u16le(f.width);
        w.u16le(f.height);
        uint8_t fpacked = 0;
        if (f.lct) fpacked |= 0x80 | detail::table_size_field(f.lct->size());
        if (f.interlaced) fpacked |= 0x40;
        if (f.lct_sorted) fpacked |= 0x20;
        w.u8(fpacked);
        if (f.lct)
            for (const Rgb& c : f.lct->entries) {
                w.u8(c.r);
                w.u8(c.g);
                w.u8(c.b);
            }

        const ColorTable* table = active_table(gif, f);
        int min_code_size;
        if (table) {
            min_code_size = detail::min_code_size_for(table->size());
        } else {
            uint8_t max_idx = 0;
            for (uint8_t idx : f.index_map) max_idx = std::max(max_idx, idx);
            min_code_size = detail::min_code_size_for(size_t(max_idx) + 1);
        }
        w.u8(uint8_t(min_code_size));

        std::vector<uint8_t> compressed =
            f.interlaced
                ? lzw::compress(min_code_size, detail::reinterlace(f.index_map, f.width, f.height))
                : lzw::compress(min_code_size, f.index_map);
        detail::write_sub_blocks(w, compressed);
    }

    for (const ExtensionBlock& ext : gif.trailing_extensions) detail::write_extension(w, ext);
    w.u8(kBlockTrailer);
    return std::move(w.bytes);
}

} // namespace gifdec
