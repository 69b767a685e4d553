#include "trackpp/kalman.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "trackpp/error.hpp"

namespace trackpp::kalman {

namespace {

bool is_symmetric(const auto& m) {
    return (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-9 * std::max(1.0, m.cwiseAbs().maxCoeff());
}

bool is_psd(const Mat7& m) {
    Eigen::SelfAdjointEigenSolver<Mat7> solver(m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff() >= -1e-9;
}

Vec4 measurement_vector(const Box& box) {
    const AreaAspect z = to_area_aspect(box);
    return {z.u, z.v, z.s, z.r};
}

}  // namespace

FilterConfig FilterConfig::defaults() {
    FilterConfig c;
    c.P0 = Vec7(10, 10, 10, 10, 1e4, 1e4, 1e4).asDiagonal();
    c.Q = Vec7(1, 1, 1, 1e-2, 1e-2, 1e-2, 1e-4).asDiagonal();
    c.R = Vec4(1, 1, 10, 1e-2).asDiagonal();
    return c;
}

void FilterConfig::validate() const {
    if (!Q.allFinite() || !R.allFinite() || !P0.allFinite()) {
        throw Error("filter config: non-finite covariance entry");
    }
    if (!is_symmetric(Q) || !is_psd(Q)) {
        throw Error("filter config: Q must be symmetric positive semidefinite");
    }
    if (!is_symmetric(P0) || !is_psd(P0)) {
        throw Error("filter config: P0 must be symmetric positive semidefinite");
    }
    if (!is_symmetric(R) || Eigen::LLT<Mat4>(R).info() != Eigen::Success) {
        throw Error("filter config: R must be symmetric positive definite");
    }
}

const Mat7& transition_matrix() {
    static const Mat7 a = [] {
        Mat7 m = Mat7::Identity();
        m(kU, 4) = 1.0;
        m(kV, 5) = 1.0;
        m(kS, 6) = 1.0;
        return m;
    }();
    return a;
}

const Mat47& observation_matrix() {
    static const Mat47 h = [] {
        Mat47 m = Mat47::Zero();
        m.leftCols<4>().setIdentity();
        return m;
    }();
    return h;
}

TrackState init(const Box& box, const FilterConfig& config) {
    const Vec4 z = measurement_vector(box);
    TrackState st;
    st.x << z, 0.0, 0.0, 0.0;
    st.P = config.P0;
    st.frame_index = 0;
    return st;
}

Prediction predict(const TrackState& state, const FilterConfig& config) {
    const Mat7& a = transition_matrix();
    Prediction out;
    out.state.x = a * state.x;
    out.state.P = a * state.P * a.transpose() + config.Q;
    out.state.frame_index = state.frame_index;

    if (!(out.state.x(kS) >= kMinArea)) {
        out.state.x(kS) = kMinArea;
        out.clamped = true;
    }
    if (!(out.state.x(kR) >= kMinAspect)) {
        out.state.x(kR) = kMinAspect;
        out.clamped = true;
    }
    out.estimation = decode(out.state.x);
    return out;
}

TrackState update(const TrackState& predicted, const Box& measurement, const FilterConfig& config) {
    const Mat47& h = observation_matrix();
    const Vec4 z = measurement_vector(measurement);

    const Mat4 innovation_cov = h * predicted.P * h.transpose() + config.R;
    Eigen::FullPivLU<Mat4> lu(innovation_cov);
    if (!lu.isInvertible()) {
        throw Error("innovation covariance not invertible");
    }
    const Eigen::Matrix<double, 7, 4> gain = predicted.P * h.transpose() * lu.inverse();

    TrackState out;
    out.x = predicted.x + gain * (z - h * predicted.x);
    const Mat7 p = (Mat7::Identity() - gain * h) * predicted.P;
    out.P = 0.5 * (p + p.transpose());
    out.frame_index = predicted.frame_index + 1;
    return out;
}

TrackState coast(const TrackState& predicted) {
    TrackState out = predicted;
    ++out.frame_index;
    return out;
}

Box decode(const Vec7& x) {
    const double s = std::max(x(kS), kMinArea);
    const double r = std::max(x(kR), kMinAspect);
    return from_area_aspect({x(kU), x(kV), s, r});
}

}  // namespace trackpp::kalman
