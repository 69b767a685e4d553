#pragma once

#include <vector>

#include "trackpp/box.hpp"

namespace trackpp::candidates {

inline constexpr int kDefaultGridSize = 16;
inline constexpr int kDefaultCount = 40;       // UOT100 setting
inline constexpr int kUtb180Count = 30;        // UTB180 setting
inline constexpr double kDefaultNmsThreshold = 0.5;

struct ResponseEntry {
    int patch_index = 0;
    double score = 0.0;
    Box box;  ///< box decoded by the tracker head for this patch
};

/// One frame of head output: grid_size x grid_size patches, each with a score and a box.
struct ResponseFrame {
    int grid_size = kDefaultGridSize;
    std::vector<ResponseEntry> entries;

    /// Throws Error("invalid response frame") on wrong count, duplicate or
    /// out-of-range patch index, or a score outside [0, 1].
    void validate() const;
};

/// Scored boxes after top-n selection and NMS, ordered by descending score.
/// items.front() is the frame's maximum-response box.
struct CandidateSet {
    std::vector<ScoredBox> items;
    int n_requested = 0;
};

/// The n highest-scoring entries, ties broken by lower patch index.
std::vector<ResponseEntry> top_n(const ResponseFrame& frame, int n);

/// Top-n selection followed by greedy NMS.
CandidateSet extract(const ResponseFrame& frame, int n, double nms_threshold);

/// Same selection rule for an unindexed pool: stable sort by score, truncate to n, NMS.
CandidateSet select(std::vector<ScoredBox> pool, int n, double nms_threshold);

}  // namespace trackpp::candidates
