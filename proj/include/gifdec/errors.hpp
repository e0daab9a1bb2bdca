#pragma once

#include <stdexcept>
#include <string>

namespace gifdec {

/// Base class for everything this library throws on bad input.
struct GifError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- codec errors ---

/// Input does not start with "GIF87a" or "GIF89a".
struct BadMagic : GifError {
    using GifError::GifError;
};

/// Input ended before a structurally complete file was read.
struct TruncatedFile : GifError {
    using GifError::GifError;
};

/// LZW stream is undecodable: code beyond the dictionary, bad minimum code
/// size, or data exhausted before the end-of-information code.
struct CorruptLzwStream : GifError {
    using GifError::GifError;
};

/// A decoded pixel index is >= the size of the frame's active color table.
struct OversizedIndex : GifError {
    using GifError::GifError;
};

/// An index handed to the LZW compressor does not fit the minimum code size.
struct IndexOutOfRange : GifError {
    using GifError::GifError;
};

/// A GifFile handed to the encoder violates a type invariant.
struct InvariantViolation : GifError {
    using GifError::GifError;
};

/// A block introducer byte that is not an extension, image, or trailer.
struct UnexpectedBlock : GifError {
    using GifError::GifError;
};

// --- color metric errors ---

struct EmptyTable : GifError {
    using GifError::GifError;
};

/// Every entry of the local table was excluded from the dissimilarity sum.
struct AllEntriesExcluded : GifError {
    using GifError::GifError;
};

// --- decimator errors ---

/// Every global-table index is already the target of an opaque remap entry,
/// so no slot is left to carry transparency.
struct NoFreeTransparentSlot : GifError {
    using GifError::GifError;
};

// --- metric errors ---

struct GeometryMismatch : GifError {
    using GifError::GifError;
};

struct FrameCountMismatch : GifError {
    using GifError::GifError;
};

} // namespace gifdec
