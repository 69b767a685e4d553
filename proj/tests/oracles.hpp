#pragma once

// Independent reference computations for tests. Nothing here calls into the
// library's geometry, filter or metric code.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "trackpp/box.hpp"

namespace trackpp::oracle {

/// Integer-cornered rectangle for exact pixel counting.
struct IntRect {
    int x0, y0, x1, y1;  // half-open [x0, x1) x [y0, y1)
};

inline IntRect to_int_rect(const Box& b) {
    return {static_cast<int>(b.x), static_cast<int>(b.y), static_cast<int>(b.x + b.w), static_cast<int>(b.y + b.h)};
}

/// Counts unit cells covered by a, b, both, and the hull (enclosing rectangle).
struct PixelCounts {
    std::int64_t inter = 0;
    std::int64_t uni = 0;
    std::int64_t hull = 0;
};

inline PixelCounts count_pixels(const Box& a, const Box& b) {
    const IntRect ra = to_int_rect(a);
    const IntRect rb = to_int_rect(b);
    const int x0 = std::min(ra.x0, rb.x0), x1 = std::max(ra.x1, rb.x1);
    const int y0 = std::min(ra.y0, rb.y0), y1 = std::max(ra.y1, rb.y1);
    PixelCounts c;
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
            const bool in_a = x >= ra.x0 && x < ra.x1 && y >= ra.y0 && y < ra.y1;
            const bool in_b = x >= rb.x0 && x < rb.x1 && y >= rb.y0 && y < rb.y1;
            c.inter += (in_a && in_b) ? 1 : 0;
            c.uni += (in_a || in_b) ? 1 : 0;
            ++c.hull;
        }
    }
    return c;
}

inline double pixel_iou(const Box& a, const Box& b) {
    const PixelCounts c = count_pixels(a, b);
    return c.uni == 0 ? 0.0 : static_cast<double>(c.inter) / static_cast<double>(c.uni);
}

inline double pixel_giou(const Box& a, const Box& b) {
    const PixelCounts c = count_pixels(a, b);
    const double inter = static_cast<double>(c.inter);
    const double uni = static_cast<double>(c.uni);
    const double hull = static_cast<double>(c.hull);
    return inter / uni - (hull - uni) / hull;
}

/// Corner-form IoU written from scratch (x1, y1, x2, y2).
inline double corner_iou(const Box& a, const Box& b) {
    if (!(a.w > 0 && a.h > 0 && b.w > 0 && b.h > 0)) {
        return 0.0;
    }
    const double ax2 = a.x + a.w, ay2 = a.y + a.h, bx2 = b.x + b.w, by2 = b.y + b.h;
    const double iw = std::max(0.0, std::min(ax2, bx2) - std::max(a.x, b.x));
    const double ih = std::max(0.0, std::min(ay2, by2) - std::max(a.y, b.y));
    const double inter = iw * ih;
    const double uni = a.w * a.h + b.w * b.h - inter;
    return uni > 0 ? inter / uni : 0.0;
}

/// O(n^2) greedy NMS without sorting: repeatedly take the highest remaining
/// score (lowest input index on ties) and drop everything overlapping it.
inline std::vector<ScoredBox> brute_force_nms(const std::vector<ScoredBox>& in, double thr) {
    std::vector<int> state(in.size(), 0);  // 0 open, 1 kept, 2 dropped
    std::vector<ScoredBox> out;
    for (;;) {
        int best = -1;
        for (std::size_t i = 0; i < in.size(); ++i) {
            if (state[i] == 0 && (best < 0 || in[i].score > in[static_cast<std::size_t>(best)].score)) {
                best = static_cast<int>(i);
            }
        }
        if (best < 0) {
            break;
        }
        state[static_cast<std::size_t>(best)] = 1;
        out.push_back(in[static_cast<std::size_t>(best)]);
        for (std::size_t i = 0; i < in.size(); ++i) {
            if (state[i] == 0 && corner_iou(in[static_cast<std::size_t>(best)].box, in[i].box) >= thr) {
                state[i] = 2;
            }
        }
    }
    return out;
}

/// Random integer-cornered box in [0, extent)^2 with sides in [1, max_side].
inline Box random_int_box(std::mt19937_64& rng, int extent, int max_side) {
    std::uniform_int_distribution<int> side(1, max_side);
    const int w = side(rng), h = side(rng);
    std::uniform_int_distribution<int> px(0, extent - w), py(0, extent - h);
    return {static_cast<double>(px(rng)), static_cast<double>(py(rng)), static_cast<double>(w),
            static_cast<double>(h)};
}

/// Scores drawn from a coarse grid so ties occur often.
inline double random_tied_score(std::mt19937_64& rng) {
    return std::uniform_int_distribution<int>(0, 20)(rng) / 20.0;
}

/// Plain-array Kalman filter for the 7-state constant-velocity model, using
/// Gauss-Jordan inversion. Independent of Eigen.
struct ReferenceFilter {
    using V7 = std::array<double, 7>;
    using M7 = std::array<std::array<double, 7>, 7>;
    V7 x{};
    M7 P{};
    M7 Q{};
    std::array<std::array<double, 4>, 4> R{};

    static M7 zero7() { return M7{}; }

    void predict() {
        V7 nx = x;
        nx[0] += x[4];
        nx[1] += x[5];
        nx[2] += x[6];
        x = nx;
        // F P F^T with F = I + E(0,4) + E(1,5) + E(2,6)
        M7 fp{};
        for (int i = 0; i < 7; ++i) {
            for (int j = 0; j < 7; ++j) {
                fp[i][j] = P[i][j] + (i < 3 ? P[i + 4][j] : 0.0);
            }
        }
        M7 out{};
        for (int i = 0; i < 7; ++i) {
            for (int j = 0; j < 7; ++j) {
                out[i][j] = fp[i][j] + (j < 3 ? fp[i][j + 4] : 0.0) + Q[i][j];
            }
        }
        P = out;
    }

    void update(const std::array<double, 4>& z) {
        // S = P[0:4,0:4] + R
        double s[4][8] = {};
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
                s[i][j] = P[i][j] + R[i][j];
            }
            s[i][4 + i] = 1.0;
        }
        for (int c = 0; c < 4; ++c) {
            int piv = c;
            for (int r = c + 1; r < 4; ++r) {
                if (std::abs(s[r][c]) > std::abs(s[piv][c])) {
                    piv = r;
                }
            }
            for (int k = 0; k < 8; ++k) {
                std::swap(s[c][k], s[piv][k]);
            }
            const double d = s[c][c];
            for (int k = 0; k < 8; ++k) {
                s[c][k] /= d;
            }
            for (int r = 0; r < 4; ++r) {
                if (r != c) {
                    const double f = s[r][c];
                    for (int k = 0; k < 8; ++k) {
                        s[r][k] -= f * s[c][k];
                    }
                }
            }
        }
        // K = P[:,0:4] S^-1
        double k[7][4] = {};
        for (int i = 0; i < 7; ++i) {
            for (int j = 0; j < 4; ++j) {
                for (int m = 0; m < 4; ++m) {
                    k[i][j] += P[i][m] * s[m][4 + j];
                }
            }
        }
        double innov[4];
        for (int j = 0; j < 4; ++j) {
            innov[j] = z[static_cast<std::size_t>(j)] - x[static_cast<std::size_t>(j)];
        }
        for (int i = 0; i < 7; ++i) {
            for (int j = 0; j < 4; ++j) {
                x[static_cast<std::size_t>(i)] += k[i][j] * innov[j];
            }
        }
        // P = (I - K H) P, H selects the first four states
        M7 np{};
        for (int i = 0; i < 7; ++i) {
            for (int j = 0; j < 7; ++j) {
                double kh_p = 0.0;
                for (int m = 0; m < 4; ++m) {
                    kh_p += k[i][m] * P[m][j];
                }
                np[i][j] = P[i][j] - kh_p;
            }
        }
        P = np;
    }
};

}  // namespace trackpp::oracle
