#include "tbd/shrinkage.hpp"

#include "tbd/rician.hpp"
#include "tbd/threshold.hpp"

#include <algorithm>
#include <string>

namespace tbd {

double target_quantile(double intensity, double sigma0, double beta) {
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("target_quantile: beta must lie in (0, 1)");
    const double mean = rician_power_mean(intensity, sigma0);
    const double sd = std::sqrt(rician_power_variance(intensity, sigma0));
    double lo = 0.0;
    double hi = mean + 10.0 * sd;
    while (target_power_cdf(hi, intensity, sigma0) < beta) {
        hi *= 2.0;
        if (hi > 1e12) throw std::domain_error("target_quantile: quantile does not exist");
    }
    while (hi - lo > 1e-8) {
        const double mid = 0.5 * (lo + hi);
        if (target_power_cdf(mid, intensity, sigma0) < beta)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

ShrinkageSolution optimal_sigma(double intensity, double sigma0, double theta, double beta) {
    if (!(sigma0 > 0.0)) throw std::invalid_argument("optimal_sigma: sigma0 must be positive");
    if (theta < 0.0) throw std::invalid_argument("optimal_sigma: theta must be >= 0");
    const double z_s = target_quantile(intensity, sigma0, beta);
    const double target_dist = mahalanobis_target(z_s, intensity, sigma0);
    auto margin = [&](double s) { return mahalanobis_noise(z_s, s, theta) - target_dist; };

    if (margin(sigma0) > 0.0) return {sigma0, z_s, true};

    const double lower = 0.05 * sigma0;
    if (!(margin(lower) > 0.0))
        throw InfeasibleShrinkage("optimal_sigma: no feasible shrinkage scale above 0.05 sigma0");

    // Scan for sign changes so that a second feasible branch is reported
    // rather than silently skipped.
    constexpr int kScan = 400;
    int crossings = 0;
    double bracket_lo = lower;
    double bracket_hi = sigma0;
    double prev = margin(lower);
    for (int k = 1; k <= kScan; ++k) {
        const double s = lower + (sigma0 - lower) * k / kScan;
        const double cur = margin(s);
        if ((prev > 0.0) != (cur > 0.0)) {
            if (++crossings == 1) {
                bracket_lo = lower + (sigma0 - lower) * (k - 1) / kScan;
                bracket_hi = s;
            }
        }
        prev = cur;
    }
    if (crossings != 1)
        throw InfeasibleShrinkage("optimal_sigma: constraint changes sign " + std::to_string(crossings) +
                                  " times on the search interval");

    const double tol = 1e-6 * sigma0;
    while (bracket_hi - bracket_lo > tol) {
        const double mid = 0.5 * (bracket_lo + bracket_hi);
        if (margin(mid) > 0.0)
            bracket_lo = mid;
        else
            bracket_hi = mid;
    }
    return {bracket_lo, z_s, false};
}

ShrinkageTable::ShrinkageTable(std::vector<std::pair<double, double>> entries) : entries_(std::move(entries)) {
    for (std::size_t k = 0; k < entries_.size(); ++k) {
        const double r = entries_[k].second;
        if (!(r > 0.0 && r <= 1.0)) throw std::invalid_argument("ShrinkageTable: ratios must lie in (0, 1]");
        if (k > 0 && !(entries_[k].first > entries_[k - 1].first))
            throw std::invalid_argument("ShrinkageTable: SNR grid must be strictly increasing");
    }
}

ShrinkageTable ShrinkageTable::identity() { return ShrinkageTable({{0.0, 1.0}}); }

double ShrinkageTable::ratio(double snr_db) const {
    if (entries_.empty()) return 1.0;
    if (snr_db > entries_.back().first) return 1.0;
    if (snr_db <= entries_.front().first) return entries_.front().second;
    const auto upper = std::lower_bound(entries_.begin(), entries_.end(), snr_db,
                                        [](const auto& e, double v) { return e.first < v; });
    if (upper->first == snr_db) return upper->second;
    const auto lower = upper - 1;
    const double t = (snr_db - lower->first) / (upper->first - lower->first);
    return lower->second + t * (upper->second - lower->second);
}

double ShrinkageTable::sigma_for_intensity(double intensity, double sigma0) const {
    if (entries_.empty() || intensity <= 0.0) return sigma0;
    return sigma0 * ratio(intensity_to_snr(intensity, sigma0));
}

ShrinkageTable build_shrinkage_table(std::span<const double> snr_grid, double sigma0, double beta,
                                     double pd_target) {
    std::vector<std::pair<double, double>> entries;
    entries.reserve(snr_grid.size());
    for (double snr : snr_grid) {
        const double amp = snr_to_intensity(snr, sigma0);
        const double theta = solve_threshold(amp, sigma0, pd_target);
        const auto sol = optimal_sigma(amp, sigma0, theta, beta);
        entries.emplace_back(snr, sol.unshrunk ? 1.0 : sol.sigma / sigma0);
    }
    return ShrinkageTable(std::move(entries));
}

}  // namespace tbd
