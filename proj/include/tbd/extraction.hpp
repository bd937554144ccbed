#pragma once

#include "tbd/phd_filter.hpp"
#include "tbd/rng.hpp"

#include <Eigen/Core>

#include <vector>

namespace tbd {

struct GaussianComponent {
    double weight = 0.0;
    Eigen::Vector4d mean = Eigen::Vector4d::Zero();
    Eigen::Matrix4d covariance = Eigen::Matrix4d::Identity();
};

struct EmOptions {
    int max_iterations = 200;
    double relative_tolerance = 1e-9;
    /// Inverse-Wishart scale keeping covariances away from singular
    /// (m^2 for positions, (m/s)^2 for velocities).
    Eigen::Vector4d prior_scale{25.0, 1.0, 25.0, 1.0};
};

struct EmResult {
    std::vector<GaussianComponent> components;
    std::vector<double> objective;  ///< penalized log-likelihood after each iteration
    bool reduced = false;           ///< fewer components than requested
};

/// Weighted Gaussian-mixture EM on [x, vx, y, vy] columns with seeded
/// k-means++ initialization. The penalized objective never decreases.
EmResult fit_weighted_gmm(const Eigen::Matrix<double, 4, Eigen::Dynamic>& points,
                          const Eigen::VectorXd& weights, int components, Rng& rng,
                          const EmOptions& options = {});

/// Component means of an EM fit to the cloud's kinematics.
std::vector<TargetState> extract_states(const ParticleCloud& cloud, std::size_t n_components, Rng& rng,
                                        bool* reduced = nullptr);

}  // namespace tbd
