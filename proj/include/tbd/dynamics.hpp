#pragma once

#include "tbd/rng.hpp"
#include "tbd/target_state.hpp"

#include <Eigen/Core>

namespace tbd {

/// Transition matrix of the nearly-constant-velocity model on [x, vx, y, vy].
Eigen::Matrix4d cv_transition_matrix(double dt);

/// Process covariance of the piecewise-constant white-acceleration model:
/// per axis [[dt^4/4, dt^3/2], [dt^3/2, dt^2]] * accel_std^2.
Eigen::Matrix4d cv_process_covariance(double dt, double accel_std);

/// Samples the next state. The intensity (if any) is carried unchanged.
TargetState cv_transition(const TargetState& state, double dt, double accel_std, Rng& rng);

}  // namespace tbd
