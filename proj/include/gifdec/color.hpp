#pragma once

// Palette comparison: normalized L2 color distance, nearest-entry search
// against the global table, and the table dissimilarity average that drives
// decimation. All arithmetic is 64-bit floating point; channels are
// normalized as value/255 exactly.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "gifdec/errors.hpp"
#include "gifdec/types.hpp"

namespace gifdec {

struct NormColor {
    double r = 0.0;
    double g = 0.0;
    double b = 0.0;
};

inline NormColor normalize(Rgb c) {
    return {c.r / 255.0, c.g / 255.0, c.b / 255.0};
}

/// Normalized L2 distance between two RGB colors, in [0,1]. Exactly 0 for
/// equal colors and exactly 1 for black vs. white.
inline double color_distance(NormColor c1, NormColor c2) {
    double dr = c1.r - c2.r;
    double dg = c1.g - c2.g;
    double db = c1.b - c2.b;
    return std::sqrt((dr * dr + dg * dg + db * db) / 3.0);
}

inline double color_distance(Rgb c1, Rgb c2) {
    return color_distance(normalize(c1), normalize(c2));
}

struct NearestEntry {
    int index = 0;
    double distance = 0.0;
};

/// Entry of `table` closest to `c`. Ties go to the smallest index so that
/// remaps are reproducible.
inline NearestEntry nearest_index(NormColor c, const ColorTable& table) {
    if (table.entries.empty()) throw EmptyTable("nearest_index on an empty color table");
    if (table.size() > 256)
        throw std::invalid_argument("color table larger than 256 entries");
    NearestEntry best{0, color_distance(c, normalize(table[0]))};
    for (size_t p = 1; p < table.size(); ++p) {
        double d = color_distance(c, normalize(table[p]));
        if (d < best.distance) best = {int(p), d};
    }
    return best;
}

inline NearestEntry nearest_index(Rgb c, const ColorTable& table) {
    return nearest_index(normalize(c), table);
}

struct DissimilarityResult {
    /// Mean nearest-entry distance over the included entries of the local
    /// table, in [0,1].
    double dissimilarity = 0.0;
    /// Per local entry k, the global index closest to it. Populated for
    /// every slot, the excluded one included.
    std::vector<uint8_t> nearest_indices;
    /// Per local entry k, the distance to that nearest global entry.
    std::vector<double> per_entry_distance;
};

/// Dissimilarity of a local table against the global one: for each entry of
/// `local` (minus `exclude`, the transparent slot whose color is never
/// shown), the distance to its nearest `global` entry, averaged over the
/// included entries.
inline DissimilarityResult table_dissimilarity(const ColorTable& local, const ColorTable& global,
                                               std::optional<int> exclude = {}) {
    if (local.entries.empty()) throw EmptyTable("table_dissimilarity with an empty local table");
    if (global.entries.empty()) throw EmptyTable("table_dissimilarity with an empty global table");
    if (exclude && (*exclude < 0 || size_t(*exclude) >= local.size()))
        throw std::invalid_argument("excluded index outside the local table");

    DissimilarityResult result;
    result.nearest_indices.reserve(local.size());
    result.per_entry_distance.reserve(local.size());

    double sum = 0.0;
    size_t included = 0;
    for (size_t k = 0; k < local.size(); ++k) {
        NearestEntry n = nearest_index(normalize(local[k]), global);
        result.nearest_indices.push_back(uint8_t(n.index));
        result.per_entry_distance.push_back(n.distance);
        if (exclude && size_t(*exclude) == k) continue;
        sum += n.distance;
        ++included;
    }
    if (included == 0)
        throw AllEntriesExcluded("every local table entry was excluded from the average");
    result.dissimilarity = sum / double(included);
    return result;
}

} // namespace gifdec
