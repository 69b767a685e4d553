#include "trackpp/box.hpp"

#include <algorithm>
#include <cmath>

#include "trackpp/error.hpp"

namespace trackpp {

CenterBox to_center(const Box& box) {
    return {box.cx(), box.cy(), box.w, box.h};
}

Box from_center(const CenterBox& c) {
    return {c.cx - 0.5 * c.w, c.cy - 0.5 * c.h, c.w, c.h};
}

AreaAspect to_area_aspect(const Box& box) {
    if (box.is_degenerate()) {
        throw Error("degenerate box");
    }
    return {box.cx(), box.cy(), box.w * box.h, box.w / box.h};
}

Box from_area_aspect(const AreaAspect& a) {
    const double w = std::sqrt(a.s * a.r);
    const double h = std::sqrt(a.s / a.r);
    return from_center({a.u, a.v, w, h});
}

double intersection_area(const Box& a, const Box& b) {
    if (a.is_degenerate() || b.is_degenerate()) {
        return 0.0;
    }
    const double iw = std::max(0.0, std::min(a.right(), b.right()) - std::max(a.x, b.x));
    const double ih = std::max(0.0, std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y));
    return iw * ih;
}

namespace {

// Extent measured from the corners, so a box overlapping itself gives
// intersection == area exactly.
double corner_area(const Box& b) {
    return (b.right() - b.x) * (b.bottom() - b.y);
}

}  // namespace

double iou(const Box& a, const Box& b) {
    const double inter = intersection_area(a, b);
    const double uni = corner_area(a) + corner_area(b) - inter;
    if (!(uni > 0.0)) {
        return 0.0;
    }
    return std::min(1.0, inter / uni);
}

double giou(const Box& a, const Box& b) {
    if (a.is_degenerate() || b.is_degenerate()) {
        return 0.0;
    }
    const double inter = intersection_area(a, b);
    const double uni = corner_area(a) + corner_area(b) - inter;
    const double hull = (std::max(a.right(), b.right()) - std::min(a.x, b.x)) *
                        (std::max(a.bottom(), b.bottom()) - std::min(a.y, b.y));
    return std::min(1.0, inter / uni) - (hull - uni) / hull;
}

Box clamp_to(const Box& box, double width, double height) {
    const double x0 = std::clamp(box.x, 0.0, width);
    const double y0 = std::clamp(box.y, 0.0, height);
    const double x1 = std::clamp(box.right(), 0.0, width);
    const double y1 = std::clamp(box.bottom(), 0.0, height);
    return {x0, y0, std::max(0.0, x1 - x0), std::max(0.0, y1 - y0)};
}

}  // namespace trackpp
