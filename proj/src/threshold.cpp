#include "tbd/threshold.hpp"

#include "tbd/quadrature.hpp"
#include "tbd/rician.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tbd {

double target_power_cdf(double power, double intensity, double sigma0) {
    if (power <= 0.0) return 0.0;
    auto density = [&](double z) { return target_likelihood(z, intensity, sigma0); };
    const double mean = rician_power_mean(intensity, sigma0);
    const double spread = std::sqrt(rician_power_variance(intensity, sigma0));
    // Split at the bulk of the density so the adaptive rule sees the peak.
    const double knee = std::min(power, mean + 12.0 * spread);
    double cdf = integrate(density, 0.0, knee, 1e-12);
    if (power > knee) cdf += integrate(density, knee, power, 1e-13);
    return std::clamp(cdf, 0.0, 1.0);
}

double detection_probability(double theta, double intensity, double sigma0) {
    if (theta < 0.0) throw std::invalid_argument("detection_probability: theta must be >= 0");
    if (theta == 0.0) return 1.0;
    const double mean = rician_power_mean(intensity, sigma0);
    if (theta <= mean) return std::clamp(1.0 - target_power_cdf(theta, intensity, sigma0), 0.0, 1.0);
    // Far tail: integrate the upper tail directly to keep small values exact.
    auto density = [&](double z) { return target_likelihood(z, intensity, sigma0); };
    const double spread = std::sqrt(rician_power_variance(intensity, sigma0));
    double tail = 0.0;
    double lo = theta;
    double width = spread;
    for (int k = 0; k < 200; ++k) {
        const double piece = integrate(density, lo, lo + width, 1e-14);
        tail += piece;
        lo += width;
        width *= 1.5;
        if (piece < 1e-18) break;
    }
    return std::clamp(tail, 0.0, 1.0);
}

double solve_threshold(double min_intensity, double sigma0, double pd_target) {
    if (!(pd_target > 0.0 && pd_target < 1.0))
        throw std::invalid_argument("solve_threshold: pd_target must lie in (0, 1)");
    if (!(sigma0 > 0.0)) throw std::invalid_argument("solve_threshold: sigma0 must be positive");
    const double v = sigma0 * sigma0;
    const double i2 = min_intensity * min_intensity;
    double lo = 0.0;
    double hi = 2.0 * v + i2 + 10.0 * sigma0 * std::sqrt(v + i2);
    while (detection_probability(hi, min_intensity, sigma0) >= pd_target) hi *= 2.0;
    while (hi - lo > 1e-8) {
        const double mid = 0.5 * (lo + hi);
        if (detection_probability(mid, min_intensity, sigma0) >= pd_target)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

double expected_clutter_count(double theta, double sigma0, std::size_t n_cells) {
    if (theta < 0.0) throw std::invalid_argument("expected_clutter_count: theta must be >= 0");
    return static_cast<double>(n_cells) * std::exp(-theta / (2.0 * sigma0 * sigma0));
}

}  // namespace tbd
