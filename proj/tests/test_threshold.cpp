#include <gtest/gtest.h>

#include "tbd/rician.hpp"
#include "tbd/threshold.hpp"

#include <boost/math/distributions/non_central_chi_squared.hpp>

#include <cmath>

using namespace tbd;

namespace {

constexpr double kSigma0 = 0.25;

/// z / sigma0^2 is noncentral chi-square with 2 degrees of freedom and
/// noncentrality I^2 / sigma0^2.
double oracle_pd(double theta, double intensity) {
    const boost::math::non_central_chi_squared d(2.0, intensity * intensity / (kSigma0 * kSigma0));
    return boost::math::cdf(boost::math::complement(d, theta / (kSigma0 * kSigma0)));
}

double oracle_threshold(double intensity, double pd) {
    const boost::math::non_central_chi_squared d(2.0, intensity * intensity / (kSigma0 * kSigma0));
    return boost::math::quantile(d, 1.0 - pd) * kSigma0 * kSigma0;
}

}  // namespace

TEST(Threshold, DetectionProbabilityLimits) {
    const double i = snr_to_intensity(8.0, kSigma0);
    EXPECT_DOUBLE_EQ(detection_probability(0.0, i, kSigma0), 1.0);
    EXPECT_LT(detection_probability(50.0, i, kSigma0), 1e-12);
}

TEST(Threshold, DetectionProbabilityMatchesNoncentralChiSquare) {
    for (int snr = 6; snr <= 13; ++snr) {
        const double i = snr_to_intensity(static_cast<double>(snr), kSigma0);
        for (double theta : {0.01, 0.05, 0.2, 0.33, 0.8, 1.5, 3.0}) {
            EXPECT_NEAR(detection_probability(theta, i, kSigma0), oracle_pd(theta, i), 1e-9)
                << "snr " << snr << " theta " << theta;
        }
    }
}

TEST(Threshold, DetectionProbabilityDecreasesInTheta) {
    const double i = snr_to_intensity(9.0, kSigma0);
    double prev = 1.0;
    for (double theta = 0.02; theta < 3.0; theta += 0.02) {
        const double pd = detection_probability(theta, i, kSigma0);
        EXPECT_LT(pd, prev);
        prev = pd;
    }
}

TEST(Threshold, TenDecibelThresholdNearTableInversion) {
    const double i = snr_to_intensity(10.0, kSigma0);
    const double theta = solve_threshold(i, kSigma0, 0.99);
    EXPECT_NEAR(theta, 0.330, 0.005);
    EXPECT_NEAR(detection_probability(0.3297, i, kSigma0), 0.99, 1e-3);
}

TEST(Threshold, SolveThresholdMatchesOracleQuantile) {
    for (int snr = 6; snr <= 13; ++snr) {
        const double i = snr_to_intensity(static_cast<double>(snr), kSigma0);
        EXPECT_NEAR(solve_threshold(i, kSigma0, 0.99), oracle_threshold(i, 0.99), 2e-8) << snr;
    }
}

TEST(Threshold, SolveThresholdIncreasesWithSnrAndVanishesAtCertainty) {
    double prev = 0.0;
    for (int snr = 6; snr <= 13; ++snr) {
        const double theta = solve_threshold(snr_to_intensity(static_cast<double>(snr), kSigma0), kSigma0, 0.99);
        EXPECT_GT(theta, prev);
        prev = theta;
    }
    EXPECT_LT(solve_threshold(snr_to_intensity(8.0, kSigma0), kSigma0, 1.0 - 1e-12), 1e-6);
}

TEST(Threshold, ClutterCount) {
    EXPECT_DOUBLE_EQ(expected_clutter_count(0.0, kSigma0, 2000), 2000.0);
    const double theta = solve_threshold(snr_to_intensity(8.0, kSigma0), kSigma0, 0.99);
    EXPECT_DOUBLE_EQ(expected_clutter_count(theta, kSigma0, 4000), 2 * expected_clutter_count(theta, kSigma0, 2000));
    EXPECT_NEAR(expected_clutter_count(theta, kSigma0, 2000), 2000 * std::exp(-theta / (2 * kSigma0 * kSigma0)), 1e-9);
}
