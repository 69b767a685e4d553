#pragma once

#include <span>
#include <vector>

namespace trackpp {

/// Axis-aligned rectangle in pixel coordinates, corner encoded (left, top, width, height).
///
/// This is the canonical encoding in every file format. A box with zero area is
/// degenerate; all overlap measures involving a degenerate box return 0.
struct Box {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;

    double right() const { return x + w; }
    double bottom() const { return y + h; }
    double cx() const { return x + 0.5 * w; }
    double cy() const { return y + 0.5 * h; }
    double area() const { return is_degenerate() ? 0.0 : w * h; }
    bool is_degenerate() const { return !(w > 0.0) || !(h > 0.0); }

    friend bool operator==(const Box&, const Box&) = default;
};

struct CenterBox {
    double cx = 0.0;
    double cy = 0.0;
    double w = 0.0;
    double h = 0.0;

    friend bool operator==(const CenterBox&, const CenterBox&) = default;
};

/// SORT-style parameterization: center (u, v), pixel area s = w*h, aspect ratio r = w/h.
struct AreaAspect {
    double u = 0.0;
    double v = 0.0;
    double s = 0.0;
    double r = 0.0;

    friend bool operator==(const AreaAspect&, const AreaAspect&) = default;
};

struct ScoredBox {
    Box box;
    double score = 0.0;

    friend bool operator==(const ScoredBox&, const ScoredBox&) = default;
};

CenterBox to_center(const Box& box);
Box from_center(const CenterBox& c);

/// Throws Error("degenerate box") when w or h is not positive.
AreaAspect to_area_aspect(const Box& box);
Box from_area_aspect(const AreaAspect& a);

/// Intersection over union in [0, 1]; 0 when either box is degenerate.
double iou(const Box& a, const Box& b);

/// Generalized IoU in (-1, 1]: IoU minus the fraction of the enclosing hull not
/// covered by the union. 0 when either box is degenerate.
double giou(const Box& a, const Box& b);

double intersection_area(const Box& a, const Box& b);

/// Clip a box to [0, width) x [0, height). May return a degenerate box.
Box clamp_to(const Box& box, double width, double height);

/// Greedy non-maximum suppression.
///
/// Candidates are stable-sorted by descending score (ties keep input order);
/// the top remaining box is kept and every remaining box with IoU >= threshold
/// against it is dropped. Output is ordered by descending score.
std::vector<ScoredBox> nms(std::span<const ScoredBox> candidates, double iou_threshold);

}  // namespace trackpp
