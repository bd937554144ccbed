#pragma once

#include <cstddef>

namespace tbd {

/// P(z <= power) for a cell holding a target of amplitude `intensity`,
/// by adaptive quadrature of the Rician power density.
double target_power_cdf(double power, double intensity, double sigma0);

/// Probability that a target cell exceeds `theta` (the Marcum Q1 function
/// evaluated at (I / sigma0, sqrt(theta) / sigma0)).
double detection_probability(double theta, double intensity, double sigma0);

/// Largest threshold whose detection probability for the weakest target
/// still reaches `pd_target`. Bisection to 1e-8 absolute on theta.
double solve_threshold(double min_intensity, double sigma0, double pd_target);

/// Expected number of noise cells exceeding theta among n_cells.
double expected_clutter_count(double theta, double sigma0, std::size_t n_cells);

}  // namespace tbd
