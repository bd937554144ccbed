#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace tbd {

/// Fisher separability between the target power class (mean 2s^2 + I^2,
/// variance 4s^2(s^2 + I^2)) and the thresholded noise class (mean 2s^2 + theta,
/// variance 4s^4).
template <typename Scalar>
Scalar fisher_separability(Scalar intensity, Scalar sigma0, Scalar theta) {
    const Scalar two_var = Scalar(2) * sigma0 * sigma0;
    const Scalar snr = intensity * intensity / two_var;
    const Scalar gap = snr - theta / two_var;
    return gap * gap / (Scalar(2) * (Scalar(1) + snr));
}

/// Separability when the noise class uses the shrunk scale sigma_s <= sigma0.
template <typename Scalar>
Scalar shrunk_separability(Scalar intensity, Scalar sigma0, Scalar sigma_s, Scalar theta) {
    const Scalar v0 = sigma0 * sigma0;
    const Scalar vs = sigma_s * sigma_s;
    const Scalar gap = Scalar(2) * v0 + intensity * intensity - theta - Scalar(2) * vs;
    return gap * gap / (Scalar(4) * v0 * (v0 + intensity * intensity) + Scalar(4) * vs * vs);
}

/// Squared Mahalanobis distance of z from the shrunk noise class.
template <typename Scalar>
Scalar mahalanobis_noise(Scalar z, Scalar sigma_s, Scalar theta) {
    const Scalar vs = sigma_s * sigma_s;
    const Scalar dev = z - theta - Scalar(2) * vs;
    return dev * dev / (Scalar(4) * vs * vs);
}

/// Squared Mahalanobis distance of z from the target class.
template <typename Scalar>
Scalar mahalanobis_target(Scalar z, Scalar intensity, Scalar sigma0) {
    const Scalar v0 = sigma0 * sigma0;
    const Scalar dev = z - Scalar(2) * v0 - intensity * intensity;
    return dev * dev / (Scalar(4) * v0 * (v0 + intensity * intensity));
}

/// beta-quantile of the target power distribution (bisection on the
/// quadrature CDF, 1e-8 absolute).
double target_quantile(double intensity, double sigma0, double beta);

/// Thrown when no shrinkage scale in (0.05 sigma0, sigma0] satisfies the
/// classification constraint, or the constraint crosses more than once.
class InfeasibleShrinkage : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ShrinkageSolution {
    double sigma = 0.0;     ///< sigma_s^M
    double quantile = 0.0;  ///< z_s
    bool unshrunk = false;  ///< constraint already holds at sigma0
};

/// Largest sigma_s <= sigma0 for which the beta-quantile target power is
/// closer (in Mahalanobis terms) to the target class than to the shrunk
/// noise class.
ShrinkageSolution optimal_sigma(double intensity, double sigma0, double theta, double beta);

/// sigma_s^M / sigma0 tabulated on an SNR grid, linearly interpolated.
class ShrinkageTable {
public:
    ShrinkageTable() = default;
    /// Entries are (snr_db, ratio) with strictly increasing SNR.
    explicit ShrinkageTable(std::vector<std::pair<double, double>> entries);

    /// All ratios equal to one: the shrinkage update then reduces to the plain one.
    static ShrinkageTable identity();

    /// Ratio at an SNR. Clamped to the first entry below the grid; 1 above it.
    [[nodiscard]] double ratio(double snr_db) const;
    /// sigma_s for a particle of amplitude `intensity`.
    [[nodiscard]] double sigma_for_intensity(double intensity, double sigma0) const;

    [[nodiscard]] const std::vector<std::pair<double, double>>& entries() const { return entries_; }
    [[nodiscard]] bool empty() const { return entries_.empty(); }

private:
    std::vector<std::pair<double, double>> entries_;
};

/// Solves the optimization at every SNR of the grid; each SNR uses its own
/// detection threshold at `pd_target`.
ShrinkageTable build_shrinkage_table(std::span<const double> snr_grid, double sigma0, double beta,
                                     double pd_target = 0.99);

}  // namespace tbd
