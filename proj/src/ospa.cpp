#include "tbd/ospa.hpp"

#include "tbd/grid.hpp"
#include "tbd/summation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tbd {

std::vector<int> hungarian(const Eigen::MatrixXd& cost) {
    const auto n = static_cast<std::size_t>(cost.rows());
    const auto m = static_cast<std::size_t>(cost.cols());
    if (n > m) throw std::invalid_argument("hungarian: more rows than columns");
    if (n == 0) return {};
    using Real = long double;
    constexpr Real kInf = std::numeric_limits<Real>::infinity();
    // 1-based potentials; column 0 is a virtual source
    std::vector<Real> u(n + 1, 0.0L), v(m + 1, 0.0L);
    std::vector<std::size_t> match(m + 1, 0), way(m + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        match[0] = i;
        std::size_t j0 = 0;
        std::vector<Real> minv(m + 1, kInf);
        std::vector<char> used(m + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = match[j0];
            Real delta = kInf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const Real cur = static_cast<Real>(cost(static_cast<Eigen::Index>(i0 - 1), static_cast<Eigen::Index>(j - 1))) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> assignment(n, -1);
    for (std::size_t j = 1; j <= m; ++j)
        if (match[j] != 0) assignment[match[j] - 1] = static_cast<int>(j - 1);
    return assignment;
}

double ospa(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double c, double p) {
    if (!(c > 0.0)) throw std::invalid_argument("ospa: cutoff must be positive");
    if (!(p >= 1.0)) throw std::invalid_argument("ospa: order must be at least 1");
    if (x.cols() > 0 && y.cols() > 0 && x.rows() != y.rows())
        throw std::invalid_argument("ospa: point dimensions differ");
    if (x.cols() == 0 && y.cols() == 0) return 0.0;
    if (x.cols() == 0 || y.cols() == 0) return c;

    const Eigen::MatrixXd& small = x.cols() <= y.cols() ? x : y;
    const Eigen::MatrixXd& large = x.cols() <= y.cols() ? y : x;
    const Eigen::Index m = small.cols();
    const Eigen::Index n = large.cols();

    Eigen::MatrixXd cost(m, n);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < n; ++j) cost(i, j) = std::pow(cutoff_distance(small.col(i), large.col(j), c), p);
    const std::vector<int> assignment = hungarian(cost);

    std::vector<double> addends;
    addends.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < m; ++i) addends.push_back(cost(i, assignment[static_cast<std::size_t>(i)]));
    const double penalty = std::pow(c, p);
    for (Eigen::Index k = m; k < n; ++k) addends.push_back(penalty);
    const double mean = exact_sum(addends) / static_cast<double>(n);
    return std::min(c, std::pow(mean, 1.0 / p));
}

namespace {

Eigen::MatrixXd polar_rows(std::span<const TargetState> states, bool velocity) {
    Eigen::MatrixXd out(1, static_cast<Eigen::Index>(states.size()));
    for (std::size_t i = 0; i < states.size(); ++i) {
        const auto polar = to_polar(states[i].kinematics);
        const double value = polar ? (velocity ? polar->doppler : polar->range) : 0.0;
        out(0, static_cast<Eigen::Index>(i)) = value;
    }
    return out;
}

}  // namespace

OspaComponents ospa_range_doppler(std::span<const TargetState> truth, std::span<const TargetState> estimates,
                                  double position_cutoff, double velocity_cutoff, double p) {
    return {ospa(polar_rows(truth, false), polar_rows(estimates, false), position_cutoff, p),
            ospa(polar_rows(truth, true), polar_rows(estimates, true), velocity_cutoff, p)};
}

}  // namespace tbd
