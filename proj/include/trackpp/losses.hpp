#pragma once

#include <optional>
#include <vector>

#include "trackpp/box.hpp"

namespace trackpp::losses {

inline constexpr double kProbEpsilon = 1e-7;

/// Predicted probabilities and Gaussian-smoothed targets on the same grid,
/// row-major. A target value of exactly 1 marks a positive cell.
struct ScoreMap {
    int rows = 0;
    int cols = 0;
    std::vector<double> p;
    std::vector<double> y;
};

struct FocalParams {
    double alpha = 2.0;
    double beta = 4.0;
};

/// Penalty-reduced focal loss, averaged over all cells:
///   positive (y == 1): -(1-p)^alpha * log(p)
///   otherwise:         -(1-y)^beta * p^alpha * log(1-p)
/// p is clamped to [eps, 1-eps].
double focal_loss(const ScoreMap& map, FocalParams params = {});

/// d focal_loss / d p for every cell (zero where the clamp is active).
std::vector<double> focal_loss_gradient(const ScoreMap& map, FocalParams params = {});

struct ImageSize {
    double width = 0.0;
    double height = 0.0;
};

/// Mean absolute difference over (x, y, w, h). With an image size, x and w are
/// divided by the width and y and h by the height first.
double l1_loss(const Box& pred, const Box& gt, std::optional<ImageSize> normalize = std::nullopt);

/// 1 - GIoU, in [0, 2).
double giou_loss(const Box& pred, const Box& gt);

struct LossWeights {
    double iou = 2.0;
    double l1 = 5.0;
};

/// cls + w.iou * iou + w.l1 * l1. All inputs must be non-negative.
double total_loss(double cls, double iou, double l1, LossWeights weights = {});

}  // namespace trackpp::losses
