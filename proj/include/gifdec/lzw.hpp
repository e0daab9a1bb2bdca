#pragma once

// GIF-flavor LZW: variable code width starting at min_code_size+1, growing
// up to 12 bits, with clear and end-of-information codes. Operates on plain
// byte runs; splitting into / joining from 255-byte sub-blocks is the
// container's job (codec.hpp).

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "gifdec/errors.hpp"

namespace gifdec::lzw {

inline constexpr int kMaxCodeWidth = 12;
inline constexpr int kMaxCodes = 1 << kMaxCodeWidth; // 4096

namespace detail {

struct BitReader {
    std::span<const uint8_t> data;
    size_t pos = 0;
    uint32_t acc = 0;
    int acc_bits = 0;

    // Codes are packed LSB-first. Returns -1 when the data runs out.
    int read(int width) {
        while (acc_bits < width) {
            if (pos == data.size()) return -1;
            acc |= uint32_t(data[pos++]) << acc_bits;
            acc_bits += 8;
        }
        int code = int(acc & ((1u << width) - 1));
        acc >>= width;
        acc_bits -= width;
        return code;
    }
};

struct BitWriter {
    std::vector<uint8_t> bytes;
    uint32_t acc = 0;
    int acc_bits = 0;

    void write(uint32_t code, int width) {
        acc |= code << acc_bits;
        acc_bits += width;
        while (acc_bits >= 8) {
            bytes.push_back(uint8_t(acc & 0xFF));
            acc >>= 8;
            acc_bits -= 8;
        }
    }

    std::vector<uint8_t> finish() {
        if (acc_bits > 0) bytes.push_back(uint8_t(acc & 0xFF));
        acc = 0;
        acc_bits = 0;
        return std::move(bytes);
    }
};

inline void check_min_code_size(int min_code_size) {
    if (min_code_size < 2 || min_code_size > 8)
        throw CorruptLzwStream("minimum code size " + std::to_string(min_code_size) +
                               " outside the valid range [2,8]");
}

} // namespace detail

/// Decompress a concatenated sub-block payload into the index sequence.
/// Handles dictionary resets, code-width growth, the KwKwK case, and the
/// deferred-clear case where the dictionary sits full while codes keep
/// coming. Throws CorruptLzwStream on a code beyond the dictionary or when
/// the data ends before the end-of-information code.
inline std::vector<uint8_t> decompress(int min_code_size, std::span<const uint8_t> data) {
    detail::check_min_code_size(min_code_size);

    const int clear_code = 1 << min_code_size;
    const int eoi_code = clear_code + 1;

    std::array<uint16_t, kMaxCodes> prefix{};
    std::array<uint8_t, kMaxCodes> suffix{};

    int next_code = eoi_code + 1;
    int width = min_code_size + 1;
    int prev = -1;

    std::vector<uint8_t> out;
    std::vector<uint8_t> stack;
    detail::BitReader reader{data};

    // Appends the expansion of `code` to `out` and returns its first byte.
    auto expand = [&](int code) -> uint8_t {
        stack.clear();
        int c = code;
        while (c >= eoi_code + 1) {
            stack.push_back(suffix[size_t(c)]);
            c = prefix[size_t(c)];
        }
        uint8_t first = uint8_t(c);
        out.push_back(first);
        out.insert(out.end(), stack.rbegin(), stack.rend());
        return first;
    };

    for (;;) {
        int code = reader.read(width);
        if (code < 0)
            throw CorruptLzwStream("data exhausted before end-of-information code");
        if (code == clear_code) {
            next_code = eoi_code + 1;
            width = min_code_size + 1;
            prev = -1;
            continue;
        }
        if (code == eoi_code) break;

        uint8_t first_byte;
        if (prev < 0) {
            // First code after a clear must be a plain root.
            if (code >= clear_code)
                throw CorruptLzwStream("first code after clear is not a root symbol");
            out.push_back(uint8_t(code));
            prev = code;
            continue;
        }

        if (code < next_code) {
            first_byte = expand(code);
        } else if (code == next_code && next_code < kMaxCodes) {
            // KwKwK: the code being defined right now.
            first_byte = expand(prev);
            out.push_back(first_byte);
        } else {
            throw CorruptLzwStream("code " + std::to_string(code) +
                                   " beyond dictionary of size " + std::to_string(next_code));
        }

        if (next_code < kMaxCodes) {
            prefix[size_t(next_code)] = uint16_t(prev);
            suffix[size_t(next_code)] = first_byte;
            ++next_code;
            if (next_code == (1 << width) && width < kMaxCodeWidth) ++width;
        }
        prev = code;
    }
    return out;
}

/// Greedy longest-match compressor. Emits a clear code first and the
/// end-of-information code last, and resets the dictionary with a clear
/// code whenever it fills. Every index must fit min_code_size bits.
inline std::vector<uint8_t> compress(int min_code_size, std::span<const uint8_t> indices) {
    if (min_code_size < 2 || min_code_size > 8)
        throw std::invalid_argument("minimum code size must be in [2,8]");

    const int clear_code = 1 << min_code_size;
    const int eoi_code = clear_code + 1;

    for (uint8_t s : indices)
        if (int(s) >= clear_code)
            throw IndexOutOfRange("index " + std::to_string(int(s)) +
                                  " does not fit a minimum code size of " +
                                  std::to_string(min_code_size));

    detail::BitWriter writer;
    int width = min_code_size + 1;
    writer.write(uint32_t(clear_code), width);

    if (indices.empty()) {
        writer.write(uint32_t(eoi_code), width);
        return writer.finish();
    }

    // (code, next byte) -> extended code
    std::unordered_map<uint32_t, uint16_t> table;
    table.reserve(kMaxCodes);
    int next_code = eoi_code + 1;
    uint16_t cur = indices[0];

    for (size_t i = 1; i < indices.size(); ++i) {
        uint8_t sym = indices[i];
        uint32_t key = (uint32_t(cur) << 8) | sym;
        auto it = table.find(key);
        if (it != table.end()) {
            cur = it->second;
            continue;
        }
        // The decoder assigns this entry only after reading the *next*
        // code, so the entry goes in before the emit and the width check
        // trails by one.
        table.emplace(key, uint16_t(next_code));
        ++next_code;
        writer.write(cur, width);
        if (next_code == (1 << width) + 1 && width < kMaxCodeWidth) ++width;
        if (next_code == kMaxCodes) {
            writer.write(uint32_t(clear_code), width);
            table.clear();
            next_code = eoi_code + 1;
            width = min_code_size + 1;
        }
        cur = sym;
    }

    writer.write(cur, width);
    // The decoder adds one more entry while processing that last code and
    // may widen before it reads the end-of-information code.
    if (next_code == (1 << width) && width < kMaxCodeWidth) ++width;
    writer.write(uint32_t(eoi_code), width);
    return writer.finish();
}

} // namespace gifdec::lzw
