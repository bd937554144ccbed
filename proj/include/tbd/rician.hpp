#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tbd {

/// log I0(x) for x >= 0. Power series below 20, Hankel asymptotic expansion
/// above; both are accurate to ~1e-15 relative in double.
template <typename Scalar>
Scalar log_bessel_i0(Scalar x) {
    using std::abs;
    using std::log;
    x = abs(x);
    if (x < Scalar(20)) {
        const Scalar q = x * x / Scalar(4);
        Scalar term(1);
        Scalar sum(1);
        for (int k = 1; k < 500; ++k) {
            term *= q / (Scalar(k) * Scalar(k));
            sum += term;
            if (term < sum * Scalar(1e-17)) break;
        }
        return log(sum);
    }
    // I0(x) ~ e^x / sqrt(2 pi x) * sum_k ((2k-1)!!)^2 / (k! (8x)^k)
    Scalar term(1);
    Scalar sum(1);
    for (int k = 1; k < 60; ++k) {
        const Scalar next = term * Scalar((2 * k - 1) * (2 * k - 1)) / (Scalar(8 * k) * x);
        if (next > term) break;  // series starts diverging
        term = next;
        sum += term;
        if (term < sum * Scalar(1e-17)) break;
    }
    return x - Scalar(0.5) * log(Scalar(2) * std::numbers::pi_v<Scalar> * x) + log(sum);
}

/// Target amplitude I for a given SNR in dB: SNR = 10 log10(I^2 / (2 sigma0^2)).
template <typename Scalar>
Scalar snr_to_intensity(Scalar snr_db, Scalar sigma0) {
    using std::pow;
    using std::sqrt;
    if (!(sigma0 > Scalar(0))) throw std::invalid_argument("snr_to_intensity: sigma0 must be positive");
    return sqrt(Scalar(2) * sigma0 * sigma0 * pow(Scalar(10), snr_db / Scalar(10)));
}

template <typename Scalar>
Scalar intensity_to_snr(Scalar intensity, Scalar sigma0) {
    using std::log10;
    return Scalar(10) * log10(intensity * intensity / (Scalar(2) * sigma0 * sigma0));
}

/// Log of the Rician power density of a cell holding a target of amplitude I:
/// g(z) = exp(-(z + I^2) / (2 s^2)) I0(I sqrt(z) / s^2) / (2 s^2).
template <typename Scalar>
Scalar log_target_likelihood(Scalar z, Scalar intensity, Scalar sigma0) {
    using std::log;
    using std::sqrt;
    const Scalar two_var = Scalar(2) * sigma0 * sigma0;
    return -log(two_var) - (z + intensity * intensity) / two_var +
           log_bessel_i0(intensity * sqrt(z) / (sigma0 * sigma0));
}

template <typename Scalar>
Scalar target_likelihood(Scalar z, Scalar intensity, Scalar sigma0) {
    using std::exp;
    return exp(log_target_likelihood(z, intensity, sigma0));
}

/// Exponential power density of a noise-only cell.
template <typename Scalar>
Scalar log_noise_density(Scalar z, Scalar sigma0) {
    using std::log;
    const Scalar two_var = Scalar(2) * sigma0 * sigma0;
    return -log(two_var) - z / two_var;
}

template <typename Scalar>
Scalar noise_density(Scalar z, Scalar sigma0) {
    using std::exp;
    return exp(log_noise_density(z, sigma0));
}

/// Noise density restricted to [theta, inf) with scale sigma. Passing a sigma
/// below the true noise level gives the shrunk clutter density.
template <typename Scalar>
Scalar log_truncated_noise_density(Scalar z, Scalar sigma, Scalar theta) {
    using std::log;
    if (z < theta) throw std::domain_error("truncated_noise_density: z below threshold");
    const Scalar two_var = Scalar(2) * sigma * sigma;
    return -log(two_var) - (z - theta) / two_var;
}

template <typename Scalar>
Scalar truncated_noise_density(Scalar z, Scalar sigma, Scalar theta) {
    using std::exp;
    return exp(log_truncated_noise_density(z, sigma, theta));
}

/// Mean and variance of the target power distribution.
template <typename Scalar>
Scalar rician_power_mean(Scalar intensity, Scalar sigma0) {
    return Scalar(2) * sigma0 * sigma0 + intensity * intensity;
}

template <typename Scalar>
Scalar rician_power_variance(Scalar intensity, Scalar sigma0) {
    const Scalar v = sigma0 * sigma0;
    return Scalar(4) * v * (v + intensity * intensity);
}

}  // namespace tbd
