#include "hvis/kalman.hpp"

#include <Eigen/Dense>

#include "hvis/error.hpp"

namespace hvis {

namespace {

using MeasurementMatrix = Eigen::Matrix<double, 4, 8>;

StateMatrix transition() {
    StateMatrix f = StateMatrix::Identity();
    for (int i = 0; i < 4; ++i) {
        f(i, 4 + i) = 1.0;
    }
    return f;
}

MeasurementMatrix observation() {
    MeasurementMatrix h = MeasurementMatrix::Zero();
    for (int i = 0; i < 4; ++i) {
        h(i, i) = 1.0;
    }
    return h;
}

void require_finite_state(const KalmanState& s) {
    if (!s.mean.allFinite() || !s.covariance.allFinite()) {
        throw Error(ErrorCode::NonFinite, "Kalman state has non-finite entries");
    }
}

}  // namespace

Box KalmanState::box() const { return from_measurement(mean.head<4>()); }

MeasurementVector to_measurement(const Box& box) {
    MeasurementVector z;
    z << box.center_x(), box.center_y(), box.width() / box.height(), box.height();
    return z;
}

Box from_measurement(const MeasurementVector& z) {
    const double h = z(3);
    const double w = z(2) * h;
    return {z(0) - 0.5 * w, z(1) - 0.5 * h, z(0) + 0.5 * w, z(1) + 0.5 * h};
}

KalmanState KalmanFilter::initiate(const Box& measurement) const {
    if (!measurement.valid()) {
        throw Error(ErrorCode::NonFinite, "cannot initiate a track from an invalid box");
    }
    KalmanState s;
    s.mean.head<4>() = to_measurement(measurement);
    s.mean.tail<4>().setZero();
    const double h = measurement.height();
    StateVector std;
    std << 2 * cfg_.std_weight_position * h, 2 * cfg_.std_weight_position * h,
        cfg_.aspect_process_std, 2 * cfg_.std_weight_position * h,
        10 * cfg_.std_weight_velocity * h, 10 * cfg_.std_weight_velocity * h,
        cfg_.aspect_velocity_std, 10 * cfg_.std_weight_velocity * h;
    s.covariance = std.array().square().matrix().asDiagonal();
    return s;
}

KalmanState KalmanFilter::predict(const KalmanState& state) const {
    require_finite_state(state);
    const double h = state.mean(3);
    StateVector std;
    std << cfg_.std_weight_position * h, cfg_.std_weight_position * h, cfg_.aspect_process_std,
        cfg_.std_weight_position * h, cfg_.std_weight_velocity * h,
        cfg_.std_weight_velocity * h, cfg_.aspect_velocity_std, cfg_.std_weight_velocity * h;
    const StateMatrix q =
        cfg_.process_noise_scale * StateMatrix(std.array().square().matrix().asDiagonal());

    static const StateMatrix f = transition();
    KalmanState out;
    out.mean = f * state.mean;
    out.covariance = f * state.covariance * f.transpose() + q;
    out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
    require_finite_state(out);
    return out;
}

KalmanState KalmanFilter::update(const KalmanState& state, const Box& measurement) const {
    require_finite_state(state);
    const MeasurementVector z = to_measurement(measurement);
    if (!z.allFinite() || !measurement.valid()) {
        throw Error(ErrorCode::NonFinite, "measurement box is invalid");
    }
    const double h = state.mean(3);
    Eigen::Vector4d std;
    std << cfg_.std_weight_position * h, cfg_.std_weight_position * h,
        cfg_.aspect_measurement_std, cfg_.std_weight_position * h;
    const Eigen::Matrix4d r =
        cfg_.measurement_noise_scale * Eigen::Matrix4d(std.array().square().matrix().asDiagonal());

    static const MeasurementMatrix hm = observation();
    const Eigen::Matrix4d s = hm * state.covariance * hm.transpose() + r;
    const Eigen::Matrix<double, 4, 8> pht_t = hm * state.covariance;  // (P H^T)^T
    // K = P H^T S^-1; solved through a rank-revealing factorisation so a
    // singular S (zero noise, collapsed covariance) yields the minimum-norm gain.
    const Eigen::Matrix<double, 8, 4> gain =
        s.completeOrthogonalDecomposition().solve(pht_t).transpose();

    KalmanState out;
    out.mean = state.mean + gain * (z - hm * state.mean);
    const StateMatrix ikh = StateMatrix::Identity() - gain * hm;
    out.covariance =
        ikh * state.covariance * ikh.transpose() + gain * r * gain.transpose();
    out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
    require_finite_state(out);
    return out;
}

}  // namespace hvis
