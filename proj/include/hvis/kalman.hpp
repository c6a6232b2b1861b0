#pragma once

#include <Eigen/Core>

#include "hvis/box.hpp"

namespace hvis {

using StateVector = Eigen::Matrix<double, 8, 1>;
using StateMatrix = Eigen::Matrix<double, 8, 8>;
using MeasurementVector = Eigen::Matrix<double, 4, 1>;

// Constant-velocity model over (cx, cy, aspect = w / h, h) and their
// velocities. Noise standard deviations scale with the box height, as in
// SORT/DeepSORT.
struct KalmanConfig {
    double std_weight_position = 1.0 / 20.0;
    double std_weight_velocity = 1.0 / 160.0;
    double aspect_measurement_std = 1e-1;
    double aspect_process_std = 1e-2;
    double aspect_velocity_std = 1e-5;
    // Multipliers on the process (Q) and measurement (R) covariances.
    double process_noise_scale = 1.0;
    double measurement_noise_scale = 1.0;
};

struct KalmanState {
    StateVector mean = StateVector::Zero();
    StateMatrix covariance = StateMatrix::Identity();

    Box box() const;
};

MeasurementVector to_measurement(const Box& box);
Box from_measurement(const MeasurementVector& z);

class KalmanFilter {
public:
    explicit KalmanFilter(KalmanConfig cfg = {}) : cfg_(cfg) {}

    const KalmanConfig& config() const { return cfg_; }

    // Zero velocity, covariance from the configured initial noise.
    KalmanState initiate(const Box& measurement) const;

    KalmanState predict(const KalmanState& state) const;

    // Joseph-form correction; the result is re-symmetrised.
    KalmanState update(const KalmanState& state, const Box& measurement) const;

private:
    KalmanConfig cfg_;
};

}  // namespace hvis
