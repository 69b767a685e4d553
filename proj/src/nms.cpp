#include <algorithm>
#include <numeric>

#include "trackpp/box.hpp"

namespace trackpp {

std::vector<ScoredBox> nms(std::span<const ScoredBox> candidates, double iou_threshold) {
    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return candidates[a].score > candidates[b].score;
    });

    std::vector<ScoredBox> kept;
    std::vector<bool> suppressed(order.size(), false);
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (suppressed[i]) {
            continue;
        }
        const ScoredBox& top = candidates[order[i]];
        kept.push_back(top);
        for (std::size_t j = i + 1; j < order.size(); ++j) {
            if (!suppressed[j] && iou(top.box, candidates[order[j]].box) >= iou_threshold) {
                suppressed[j] = true;
            }
        }
    }
    return kept;
}

}  // namespace trackpp
