#include <gtest/gtest.h>

#include "tbd/ospa.hpp"
#include "tbd/summation.hpp"

#include <algorithm>
#include <numeric>
#include <random>

using namespace tbd;

namespace {

/// Exhaustive minimum over all injective assignments.
double brute_force_ospa(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double c) {
    if (x.cols() == 0 && y.cols() == 0) return 0.0;
    if (x.cols() == 0 || y.cols() == 0) return c;
    const Eigen::MatrixXd& small = x.cols() <= y.cols() ? x : y;
    const Eigen::MatrixXd& large = x.cols() <= y.cols() ? y : x;
    const auto m = small.cols(), n = large.cols();
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        std::vector<double> addends;
        for (Eigen::Index i = 0; i < m; ++i)
            addends.push_back(std::min(c, (small.col(i) - large.col(perm[static_cast<std::size_t>(i)])).norm()));
        for (Eigen::Index k = m; k < n; ++k) addends.push_back(c);
        best = std::min(best, exact_sum(addends));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return std::min(c, best / static_cast<double>(n));
}

Eigen::MatrixXd random_set(std::mt19937_64& g, int dim, int count, double spread) {
    std::uniform_real_distribution<double> u(0.0, spread);
    Eigen::MatrixXd out(dim, count);
    for (int j = 0; j < count; ++j)
        for (int d = 0; d < dim; ++d) out(d, j) = u(g);
    return out;
}

}  // namespace

TEST(Ospa, CutoffDistance) {
    const Eigen::Vector2d q(0, 0), y(3, 4);
    EXPECT_EQ(cutoff_distance(q, q, 10.0), 0.0);
    EXPECT_EQ(cutoff_distance(q, y, 10.0), 5.0);
    EXPECT_EQ(cutoff_distance(q, y, 2.5), 2.5);
    EXPECT_EQ(cutoff_distance(y, q, 10.0), cutoff_distance(q, y, 10.0));
}

TEST(Ospa, WorkedCardinalityCase) {
    const double c = 250.0;
    Eigen::MatrixXd q(1, 1), y(1, 2);
    q << 89000.0;
    y << 89000.0, 85000.0;
    EXPECT_EQ(ospa(q, y, c), c / 2.0);
    EXPECT_EQ(ospa(y, q, c), c / 2.0);
}

TEST(Ospa, EmptyAndIdenticalSets) {
    const Eigen::MatrixXd none(1, 0);
    Eigen::MatrixXd y(1, 3);
    y << 1.0, 7.0, 9.0;
    EXPECT_EQ(ospa(none, none, 5.0), 0.0);
    EXPECT_EQ(ospa(none, y, 5.0), 5.0);
    EXPECT_EQ(ospa(y, y, 5.0), 0.0);
    Eigen::MatrixXd shuffled(1, 3);
    shuffled << 9.0, 1.0, 7.0;
    EXPECT_EQ(ospa(y, shuffled, 5.0), 0.0);
}

TEST(Ospa, AgreesExactlyWithPermutationOracle) {
    std::mt19937_64 g(42);
    std::uniform_int_distribution<int> size(0, 6), dim(1, 3);
    std::uniform_real_distribution<double> cut(0.5, 30.0);
    for (int rep = 0; rep < 1000; ++rep) {
        const int d = dim(g);
        const Eigen::MatrixXd x = random_set(g, d, size(g), 40.0);
        const Eigen::MatrixXd y = random_set(g, d, size(g), 40.0);
        const double c = cut(g);
        const double v = ospa(x, y, c);
        EXPECT_EQ(v, brute_force_ospa(x, y, c)) << "instance " << rep;
        EXPECT_EQ(v, ospa(y, x, c)) << "instance " << rep;
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, c);
    }
}

TEST(Ospa, MonotoneInCutoff) {
    std::mt19937_64 g(7);
    for (int rep = 0; rep < 100; ++rep) {
        const Eigen::MatrixXd x = random_set(g, 2, 4, 50.0);
        const Eigen::MatrixXd y = random_set(g, 2, 5, 50.0);
        double prev = 0.0;
        for (double c = 1.0; c < 80.0; c += 3.0) {
            const double v = ospa(x, y, c);
            EXPECT_GE(v, prev - 1e-12);
            prev = v;
        }
    }
}

TEST(Ospa, HungarianOnRectangularCost) {
    Eigen::MatrixXd cost(2, 3);
    cost << 4, 1, 3,
            2, 0, 5;
    const auto a = hungarian(cost);
    ASSERT_EQ(a.size(), 2u);
    EXPECT_EQ(a[0], 1);
    EXPECT_EQ(a[1], 0);
    EXPECT_THROW(hungarian(Eigen::MatrixXd(3, 2)), std::invalid_argument);
}

TEST(Ospa, RangeDopplerComponents) {
    const std::vector<TargetState> truth{TargetState(89000, -200, 0, 0), TargetState(89000, -300, 0, 0)};
    const std::vector<TargetState> est{TargetState(89020, -210, 0, 0)};
    const OspaComponents o = ospa_range_doppler(truth, est);
    EXPECT_NEAR(o.position, (20.0 + 250.0) / 2.0, 1e-9);
    EXPECT_NEAR(o.velocity, (10.0 + 50.0) / 2.0, 1e-9);
    const OspaComponents none = ospa_range_doppler(truth, {});
    EXPECT_EQ(none.position, 250.0);
    EXPECT_EQ(none.velocity, 50.0);
}

TEST(Ospa, RejectsBadArguments) {
    const Eigen::MatrixXd a(1, 1), b(2, 1);
    EXPECT_THROW(ospa(a, a, 0.0), std::invalid_argument);
    EXPECT_THROW(ospa(a, b, 1.0), std::invalid_argument);
}
