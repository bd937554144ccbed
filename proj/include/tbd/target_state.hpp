#pragma once

#include <Eigen/Core>

#include <optional>

namespace tbd {

/// Kinematic state [x, vx, y, vy] (m, m/s), optionally augmented with the
/// target amplitude I.
struct TargetState {
    Eigen::Vector4d kinematics = Eigen::Vector4d::Zero();
    std::optional<double> intensity;

    TargetState() = default;
    TargetState(double x, double vx, double y, double vy, std::optional<double> amp = std::nullopt)
        : kinematics(x, vx, y, vy), intensity(amp) {}

    [[nodiscard]] double x() const { return kinematics(0); }
    [[nodiscard]] double vx() const { return kinematics(1); }
    [[nodiscard]] double y() const { return kinematics(2); }
    [[nodiscard]] double vy() const { return kinematics(3); }
};

}  // namespace tbd
