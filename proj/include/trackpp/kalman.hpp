#pragma once

#include <Eigen/Core>

#include "trackpp/box.hpp"

namespace trackpp::kalman {

using Vec7 = Eigen::Matrix<double, 7, 1>;
using Vec4 = Eigen::Matrix<double, 4, 1>;
using Mat7 = Eigen::Matrix<double, 7, 7>;
using Mat4 = Eigen::Matrix<double, 4, 4>;
using Mat47 = Eigen::Matrix<double, 4, 7>;

// State layout [u, v, s, r, u', v', s'].
inline constexpr int kU = 0;
inline constexpr int kV = 1;
inline constexpr int kS = 2;
inline constexpr int kR = 3;

inline constexpr double kMinArea = 1.0;
inline constexpr double kMinAspect = 1e-3;

/// Noise model for the constant-velocity filter. The transition and observation
/// matrices are fixed (see transition_matrix / observation_matrix); there is no
/// control input.
struct FilterConfig {
    Mat7 Q;   ///< process noise covariance
    Mat4 R;   ///< measurement noise covariance
    Mat7 P0;  ///< initial error covariance

    /// P0 = diag(10,10,10,10,1e4,1e4,1e4), Q = diag(1,1,1,1e-2,1e-2,1e-2,1e-4),
    /// R = diag(1,1,10,1e-2).
    static FilterConfig defaults();

    /// Throws Error unless Q and P0 are symmetric PSD and R is symmetric positive definite.
    void validate() const;
};

struct TrackState {
    Vec7 x = Vec7::Zero();
    Mat7 P = Mat7::Identity();
    int frame_index = 0;
};

struct Prediction {
    TrackState state;  ///< prior estimate for the current frame
    Box estimation;    ///< decoded estimation box
    bool clamped = false;
};

const Mat7& transition_matrix();
const Mat47& observation_matrix();

TrackState init(const Box& box, const FilterConfig& config);

/// Time update. s and r are clamped to kMinArea / kMinAspect in the returned
/// state and `clamped` is set when either clamp fires.
Prediction predict(const TrackState& state, const FilterConfig& config);

/// Measurement update with a corner-encoded box; increments frame_index.
TrackState update(const TrackState& predicted, const Box& measurement, const FilterConfig& config);

/// Advance frame_index on the prior without a measurement.
TrackState coast(const TrackState& predicted);

/// Center (u, v), w = sqrt(s*r), h = sqrt(s/r), with s and r clamped first.
Box decode(const Vec7& x);

}  // namespace trackpp::kalman
