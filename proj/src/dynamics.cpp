#include "tbd/dynamics.hpp"

#include <random>
#include <stdexcept>

namespace tbd {

Eigen::Matrix4d cv_transition_matrix(double dt) {
    Eigen::Matrix4d f = Eigen::Matrix4d::Identity();
    f(0, 1) = dt;
    f(2, 3) = dt;
    return f;
}

Eigen::Matrix4d cv_process_covariance(double dt, double accel_std) {
    Eigen::Matrix2d block;
    block << dt * dt * dt * dt / 4.0, dt * dt * dt / 2.0,
             dt * dt * dt / 2.0, dt * dt;
    Eigen::Matrix4d q = Eigen::Matrix4d::Zero();
    q.topLeftCorner<2, 2>() = block;
    q.bottomRightCorner<2, 2>() = block;
    return q * (accel_std * accel_std);
}

TargetState cv_transition(const TargetState& state, double dt, double accel_std, Rng& rng) {
    if (!(dt > 0.0)) throw std::invalid_argument("cv_transition: dt must be positive");
    TargetState next = state;
    next.kinematics = cv_transition_matrix(dt) * state.kinematics;
    if (accel_std > 0.0) {
        std::normal_distribution<double> accel(0.0, accel_std);
        const double ax = accel(rng);
        const double ay = accel(rng);
        next.kinematics += Eigen::Vector4d(0.5 * dt * dt * ax, dt * ax, 0.5 * dt * dt * ay, dt * ay);
    }
    return next;
}

}  // namespace tbd
