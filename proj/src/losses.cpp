#include "trackpp/losses.hpp"

#include <algorithm>
#include <cmath>

#include "trackpp/error.hpp"

namespace trackpp::losses {

namespace {

void validate(const ScoreMap& map) {
    const std::size_t cells = static_cast<std::size_t>(std::max(map.rows, 0)) *
                              static_cast<std::size_t>(std::max(map.cols, 0));
    if (cells == 0 || map.p.size() != cells || map.y.size() != cells) {
        throw Error("score map: prediction and target grids must match rows*cols");
    }
    for (std::size_t i = 0; i < cells; ++i) {
        if (!std::isfinite(map.p[i])) {
            throw Error("score map: probability outside (0, 1) after clamping");
        }
        if (!(map.y[i] >= 0.0 && map.y[i] <= 1.0)) {
            throw Error("score map: target outside [0, 1]");
        }
    }
}

double clamp_prob(double p) {
    return std::clamp(p, kProbEpsilon, 1.0 - kProbEpsilon);
}

}  // namespace

double focal_loss(const ScoreMap& map, FocalParams params) {
    validate(map);
    double sum = 0.0;
    for (std::size_t i = 0; i < map.p.size(); ++i) {
        const double p = clamp_prob(map.p[i]);
        const double y = map.y[i];
        if (y == 1.0) {
            sum += -std::pow(1.0 - p, params.alpha) * std::log(p);
        } else {
            sum += -std::pow(1.0 - y, params.beta) * std::pow(p, params.alpha) * std::log(1.0 - p);
        }
    }
    return sum / static_cast<double>(map.p.size());
}

std::vector<double> focal_loss_gradient(const ScoreMap& map, FocalParams params) {
    validate(map);
    const double n = static_cast<double>(map.p.size());
    const double a = params.alpha;
    std::vector<double> grad(map.p.size(), 0.0);
    for (std::size_t i = 0; i < map.p.size(); ++i) {
        const double raw = map.p[i];
        if (raw <= kProbEpsilon || raw >= 1.0 - kProbEpsilon) {
            continue;
        }
        const double p = raw;
        const double y = map.y[i];
        double g = 0.0;
        if (y == 1.0) {
            g = a * std::pow(1.0 - p, a - 1.0) * std::log(p) - std::pow(1.0 - p, a) / p;
        } else {
            const double w = std::pow(1.0 - y, params.beta);
            g = -w * (a * std::pow(p, a - 1.0) * std::log(1.0 - p) - std::pow(p, a) / (1.0 - p));
        }
        grad[i] = g / n;
    }
    return grad;
}

double l1_loss(const Box& pred, const Box& gt, std::optional<ImageSize> normalize) {
    double sx = 1.0;
    double sy = 1.0;
    if (normalize) {
        if (!(normalize->width > 0.0 && normalize->height > 0.0)) {
            throw Error("l1 loss: image size must be positive", ErrorKind::usage);
        }
        sx = 1.0 / normalize->width;
        sy = 1.0 / normalize->height;
    }
    return (std::abs(pred.x - gt.x) * sx + std::abs(pred.y - gt.y) * sy + std::abs(pred.w - gt.w) * sx +
            std::abs(pred.h - gt.h) * sy) /
           4.0;
}

double giou_loss(const Box& pred, const Box& gt) {
    return 1.0 - giou(pred, gt);
}

double total_loss(double cls, double iou, double l1, LossWeights weights) {
    if (!(cls >= 0.0 && iou >= 0.0 && l1 >= 0.0)) {
        throw Error("total loss: component losses must be non-negative", ErrorKind::usage);
    }
    return cls + weights.iou * iou + weights.l1 * l1;
}

}  // namespace trackpp::losses
