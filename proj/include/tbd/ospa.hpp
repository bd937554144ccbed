#pragma once

#include "tbd/target_state.hpp"

#include <Eigen/Core>

#include <span>
#include <vector>

namespace tbd {

/// min(c, d(x, y)) for the Euclidean base distance.
template <typename Derived1, typename Derived2>
typename Derived1::Scalar cutoff_distance(const Eigen::MatrixBase<Derived1>& x, const Eigen::MatrixBase<Derived2>& y,
                                          typename Derived1::Scalar c) {
    using std::min;
    return min(c, (x - y).norm());
}

/// Minimum-cost assignment of every row to a distinct column (rows <= cols).
/// Returns the column of each row.
std::vector<int> hungarian(const Eigen::MatrixXd& cost);

/// OSPA distance of order p between point sets stored as columns.
/// Two empty sets are at distance 0; one empty set is at distance c.
double ospa(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double c, double p = 1.0);

struct OspaComponents {
    double position = 0.0;  ///< on range, cutoff in metres
    double velocity = 0.0;  ///< on Doppler, cutoff in m/s
};

/// Position and velocity OSPA evaluated in the sensor's range and Doppler
/// coordinates.
OspaComponents ospa_range_doppler(std::span<const TargetState> truth, std::span<const TargetState> estimates,
                                  double position_cutoff = 250.0, double velocity_cutoff = 50.0, double p = 1.0);

}  // namespace tbd
