#include <gtest/gtest.h>

#include "tbd/quadrature.hpp"
#include "tbd/rician.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include <cmath>
#include <limits>

using namespace tbd;

namespace {

constexpr double kSigma0 = 0.25;

double boost_integral(auto f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13);
}

}  // namespace

TEST(Rician, LogBesselAgreesWithStdAcrossSwitch) {
    for (double x : {0.0, 1e-6, 0.3, 1.0, 5.0, 12.0, 19.9, 20.0, 20.1, 35.0, 120.0, 600.0}) {
        const double ref = std::log(std::cyl_bessel_i(0.0, x));
        EXPECT_NEAR(log_bessel_i0(x), ref, 1e-9 * std::max(1.0, std::abs(ref))) << "x = " << x;
    }
    const double ref = std::log(boost::math::cyl_bessel_i(0, 50.0));
    EXPECT_NEAR(log_bessel_i0(50.0), ref, 1e-9 * ref);
    EXPECT_TRUE(std::isfinite(log_bessel_i0(5000.0)));
}

TEST(Rician, SnrConversions) {
    EXPECT_NEAR(snr_to_intensity(0.0, kSigma0), std::sqrt(2.0) * kSigma0, 1e-15);
    EXPECT_NEAR(snr_to_intensity(9.0, kSigma0), 0.99645, 5e-5);
    for (double s = 6; s <= 13; s += 1) EXPECT_NEAR(intensity_to_snr(snr_to_intensity(s, kSigma0), kSigma0), s, 1e-12);
    EXPECT_THROW(snr_to_intensity(9.0, 0.0), std::invalid_argument);
}

TEST(Rician, ZeroIntensityIsNoiseDensity) {
    for (double z : {0.0, 0.05, 0.4, 2.0}) EXPECT_DOUBLE_EQ(target_likelihood(z, 0.0, kSigma0), noise_density(z, kSigma0));
    EXPECT_DOUBLE_EQ(noise_density(0.0, kSigma0), 8.0);
}

TEST(Rician, LogDomainMatchesDirectEvaluation) {
    const double i = snr_to_intensity(9.0, kSigma0);
    for (double z : {0.01, 0.3, 1.0, 2.5}) {
        const double v = kSigma0 * kSigma0;
        const double direct = std::exp(-(z + i * i) / (2 * v)) * std::cyl_bessel_i(0.0, i * std::sqrt(z) / v) / (2 * v);
        EXPECT_NEAR(target_likelihood(z, i, kSigma0), direct, 1e-10 * direct);
    }
}

TEST(Rician, NormalizationAndMomentsByIndependentQuadrature) {
    for (int snr = 6; snr <= 13; ++snr) {
        const double i = snr_to_intensity(static_cast<double>(snr), kSigma0);
        const double mean = rician_power_mean(i, kSigma0);
        const double sd = std::sqrt(rician_power_variance(i, kSigma0));
        const double hi = mean + 40 * sd;
        auto g = [&](double z) { return target_likelihood(z, i, kSigma0); };
        const double mass = boost_integral(g, 0.0, hi);
        const double m1 = boost_integral([&](double z) { return z * g(z); }, 0.0, hi);
        const double m2 = boost_integral([&](double z) { return (z - mean) * (z - mean) * g(z); }, 0.0, hi);
        EXPECT_NEAR(mass, 1.0, 1e-6) << snr;
        EXPECT_NEAR(m1, 2 * kSigma0 * kSigma0 + i * i, 1e-4 * mean) << snr;
        EXPECT_NEAR(m2, 4 * kSigma0 * kSigma0 * (kSigma0 * kSigma0 + i * i), 1e-4 * sd * sd) << snr;
    }
}

TEST(Rician, NoiseMoments) {
    auto p = [](double z) { return noise_density(z, kSigma0); };
    const double mean = boost_integral([&](double z) { return z * p(z); }, 0.0, 10.0);
    const double var = boost_integral([&](double z) { return (z - mean) * (z - mean) * p(z); }, 0.0, 10.0);
    EXPECT_NEAR(mean, 2 * kSigma0 * kSigma0, 1e-10);
    EXPECT_NEAR(var, 4 * std::pow(kSigma0, 4), 1e-10);
}

TEST(Rician, TruncatedNoiseDensity) {
    const double theta = 0.2;
    EXPECT_DOUBLE_EQ(truncated_noise_density(theta, kSigma0, theta), 1.0 / (2 * kSigma0 * kSigma0));
    for (double s : {kSigma0, 0.7 * kSigma0, 0.3 * kSigma0}) {
        auto p = [&](double z) { return truncated_noise_density(z, s, theta); };
        EXPECT_NEAR(boost_integral(p, theta, theta + 80 * s * s), 1.0, 1e-9);
    }
    const double mean = boost_integral([&](double z) { return z * truncated_noise_density(z, kSigma0, theta); }, theta,
                                       theta + 10.0);
    EXPECT_NEAR(mean, 2 * kSigma0 * kSigma0 + theta, 1e-9);
    EXPECT_THROW(truncated_noise_density(0.1, kSigma0, theta), std::domain_error);
}

TEST(Quadrature, AdaptiveIntegratorOnKnownIntegrals) {
    EXPECT_NEAR(integrate([](double x) { return std::exp(-x); }, 0.0, 30.0), 1.0 - std::exp(-30.0), 1e-12);
    EXPECT_NEAR(integrate([](double x) { return std::sqrt(x); }, 0.0, 1.0), 2.0 / 3.0, 1e-10);
    EXPECT_NEAR(integrate([](double x) { return std::sin(x); }, 0.0, M_PI), 2.0, 1e-12);
}
