#include "trackpp/candidates.hpp"

#include <algorithm>
#include <string>

#include "trackpp/error.hpp"

namespace trackpp::candidates {

namespace {

void check_params(int n, int pool_size, double nms_threshold) {
    if (n < 1 || n > pool_size) {
        throw Error("candidate count n=" + std::to_string(n) + " outside [1, " +
                    std::to_string(pool_size) + "]", ErrorKind::usage);
    }
    if (!(nms_threshold >= 0.0 && nms_threshold <= 1.0)) {
        throw Error("nms threshold outside [0, 1]", ErrorKind::usage);
    }
}

}  // namespace

void ResponseFrame::validate() const {
    if (grid_size < 1) {
        throw Error("invalid response frame: grid size must be positive");
    }
    const std::size_t cells = static_cast<std::size_t>(grid_size) * static_cast<std::size_t>(grid_size);
    if (entries.size() != cells) {
        throw Error("invalid response frame: expected " + std::to_string(cells) + " entries, got " +
                    std::to_string(entries.size()));
    }
    std::vector<bool> seen(cells, false);
    for (const ResponseEntry& e : entries) {
        if (e.patch_index < 0 || static_cast<std::size_t>(e.patch_index) >= cells) {
            throw Error("invalid response frame: patch index " + std::to_string(e.patch_index) +
                        " out of range");
        }
        if (seen[static_cast<std::size_t>(e.patch_index)]) {
            throw Error("invalid response frame: duplicate patch index " + std::to_string(e.patch_index));
        }
        seen[static_cast<std::size_t>(e.patch_index)] = true;
        if (!(e.score >= 0.0 && e.score <= 1.0)) {
            throw Error("invalid response frame: score outside [0, 1]");
        }
    }
}

std::vector<ResponseEntry> top_n(const ResponseFrame& frame, int n) {
    frame.validate();
    check_params(n, static_cast<int>(frame.entries.size()), 0.0);

    std::vector<ResponseEntry> pool = frame.entries;
    const auto by_rank = [](const ResponseEntry& a, const ResponseEntry& b) {
        if (a.score != b.score) {
            return a.score > b.score;
        }
        return a.patch_index < b.patch_index;
    };
    std::partial_sort(pool.begin(), pool.begin() + n, pool.end(), by_rank);
    pool.resize(static_cast<std::size_t>(n));
    return pool;
}

CandidateSet extract(const ResponseFrame& frame, int n, double nms_threshold) {
    check_params(n, frame.grid_size * frame.grid_size, nms_threshold);
    const std::vector<ResponseEntry> pool = top_n(frame, n);

    std::vector<ScoredBox> scored;
    scored.reserve(pool.size());
    for (const ResponseEntry& e : pool) {
        scored.push_back({e.box, e.score});
    }
    return {nms(scored, nms_threshold), n};
}

CandidateSet select(std::vector<ScoredBox> pool, int n, double nms_threshold) {
    if (pool.empty()) {
        return {{}, n};
    }
    check_params(n, std::max<int>(n, 1), nms_threshold);
    std::stable_sort(pool.begin(), pool.end(),
                     [](const ScoredBox& a, const ScoredBox& b) { return a.score > b.score; });
    if (pool.size() > static_cast<std::size_t>(n)) {
        pool.resize(static_cast<std::size_t>(n));
    }
    return {nms(pool, nms_threshold), n};
}

}  // namespace trackpp::candidates
