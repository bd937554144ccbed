#include <gtest/gtest.h>

#include "tbd/phd_filter.hpp"
#include "tbd/rician.hpp"
#include "tbd/scenario.hpp"
#include "tbd/threshold.hpp"

#include <algorithm>
#include <numeric>

using namespace tbd;

namespace {

constexpr double kSigma0 = 0.25;

struct Fixture {
    ScenarioSpec spec = scenario_preset("spawn");
    FilterConfig config;
    double intensity = snr_to_intensity(9.0, kSigma0);
    double theta = solve_threshold(snr_to_intensity(9.0, kSigma0), kSigma0, 0.99);
    double lambda = expected_clutter_count(theta, kSigma0, 2000);

    Fixture() { config.intensity = IntensityPrior::known(intensity); }

    [[nodiscard]] UpdateContext context() const { return {&spec.grid, kSigma0, theta, lambda, ClutterDensity::scan}; }

    /// A cloud of `n` particles placed at given kinematic states.
    [[nodiscard]] ParticleCloud cloud_at(const std::vector<Eigen::Vector4d>& states, double weight) const {
        ParticleCloud::StateMatrix s(5, static_cast<Eigen::Index>(states.size()));
        for (std::size_t i = 0; i < states.size(); ++i) {
            s.col(static_cast<Eigen::Index>(i)).head<4>() = states[i];
            s(4, static_cast<Eigen::Index>(i)) = intensity;
        }
        return ParticleCloud(s, Eigen::VectorXd::Constant(static_cast<Eigen::Index>(states.size()), weight), 1,
                             states.size(), 0);
    }

    [[nodiscard]] Measurement measurement_at(const Eigen::Vector4d& state, double power) const {
        const auto cell = state_to_cell(state, spec.grid);
        return {spec.grid.range_center(cell->range), spec.grid.doppler_center(cell->doppler),
                spec.grid.bearing_center(cell->bearing), power, *cell};
    }
};

}  // namespace

TEST(PhdFilter, InitializeAndBirthInjection) {
    Fixture f;
    Rng rng(1);
    const ParticleCloud empty = initialize(f.config, f.spec.grid, 0, 0.0, rng);
    EXPECT_EQ(estimate_cardinality(empty), 0.0);

    const ParticleCloud zero_mass = initialize(f.config, f.spec.grid, 2000, 0.0, rng);
    EXPECT_EQ(zero_mass.size(), 2000u);
    const ParticleCloud predicted = predict(zero_mass, f.config, f.spec.grid, 1.0, rng);
    EXPECT_EQ(predicted.size(), 2000u + f.config.birth_count);
    EXPECT_EQ(predicted.birth_count(), f.config.birth_count);
    EXPECT_NEAR(estimate_cardinality(predicted), 0.2, 1e-12);
    for (Eigen::Index i = 2000; i < static_cast<Eigen::Index>(predicted.size()); ++i)
        EXPECT_TRUE(state_to_cell(Eigen::Vector4d(predicted.states().col(i).head<4>()), f.spec.grid).has_value());

    Rng a(5), b(5);
    EXPECT_EQ(initialize(f.config, f.spec.grid, 100, 1.0, a).states(),
              initialize(f.config, f.spec.grid, 100, 1.0, b).states());
}

TEST(PhdFilter, PredictWeightAlgebra) {
    Fixture f;
    f.config.spawn_mass = 0.0;
    f.config.accel_noise_std = 0.0;
    Rng rng(2);
    const ParticleCloud cloud = f.cloud_at({{89000, -200, 0, 0}, {85000, -300, 0, 0}}, 0.5);
    for (double e : {1.0, 0.99}) {
        f.config.survival = e;
        const ParticleCloud p = predict(cloud, f.config, f.spec.grid, 1.0, rng);
        EXPECT_EQ(p.persistent_count(), 2u);
        EXPECT_EQ(p.weights().head(2).sum(), e * 1.0);
        EXPECT_EQ(p.states().col(0).head<4>(), Eigen::Vector4d(88800, -200, 0, 0));
        EXPECT_EQ(p.states().col(1).head<4>(), Eigen::Vector4d(84700, -300, 0, 0));
    }
    f.config.survival = 0.99;
    f.config.spawn_mass = 0.05;
    const ParticleCloud p = predict(cloud, f.config, f.spec.grid, 1.0, rng);
    EXPECT_NEAR(p.weights().head(2).sum(), 1.04, 1e-15);
}

TEST(PhdFilter, IntensityJitterStaysInRange) {
    Fixture f;
    const double lo = snr_to_intensity(8.0, kSigma0), hi = snr_to_intensity(11.0, kSigma0);
    f.config.intensity = IntensityPrior::range(lo, hi);
    Rng rng(3);
    ParticleCloud c = initialize(f.config, f.spec.grid, 500, 1.0, rng);
    for (int k = 0; k < 5; ++k) c = predict(c, f.config, f.spec.grid, 1.0, rng);
    EXPECT_GE(c.states().row(4).minCoeff(), lo);
    EXPECT_LE(c.states().row(4).maxCoeff(), hi);
    EXPECT_GT(c.states().row(4).maxCoeff() - c.states().row(4).minCoeff(), 0.1 * (hi - lo));
}

TEST(PhdFilter, MeasurementLikelihoodCellIndicator) {
    Fixture f;
    const Eigen::Vector4d x(89000, -200, 0, 0);
    const Measurement m = f.measurement_at(x, 1.1);
    const Particle in{TargetState(x(0), x(1), x(2), x(3), f.intensity), 1.0};
    EXPECT_DOUBLE_EQ(measurement_likelihood(m, in, f.spec.grid, kSigma0), target_likelihood(1.1, f.intensity, kSigma0));
    const Particle elsewhere{TargetState(85000, -200, 0, 0, f.intensity), 1.0};
    EXPECT_EQ(measurement_likelihood(m, elsewhere, f.spec.grid, kSigma0), 0.0);
    const Particle outside{TargetState(70000, -200, 0, 0, f.intensity), 1.0};
    EXPECT_EQ(measurement_likelihood(m, outside, f.spec.grid, kSigma0), 0.0);
    const Particle zero{TargetState(x(0), x(1), x(2), x(3), 0.0), 1.0};
    EXPECT_DOUBLE_EQ(measurement_likelihood(m, zero, f.spec.grid, kSigma0), noise_density(1.1, kSigma0));
}

TEST(PhdFilter, UpdateMatchesHandComputation) {
    Fixture f;
    const Eigen::Vector4d a(89000, -200, 0, 0), b(89010, -205, 0, 0), far(85000, -300, 0, 0);
    const ParticleCloud cloud = f.cloud_at({a, b, far}, 0.3);
    MeasurementSet z{f.theta, 1, {f.measurement_at(a, 1.2)}};
    UpdateStats stats;
    const ParticleCloud u = update_plain(cloud, z, f.context(), &stats);
    const double g = target_likelihood(1.2, f.intensity, kSigma0);
    const double kappa = f.lambda * truncated_noise_density(1.2, kSigma0, f.theta);
    const double expect = g * 0.3 / (kappa + 2 * g * 0.3);
    EXPECT_NEAR(u.weights()(0), expect, 1e-14 * expect);
    EXPECT_EQ(u.weights()(0), u.weights()(1));
    EXPECT_EQ(u.weights()(2), 0.0);
    EXPECT_EQ(stats.measurements, 1u);
    EXPECT_EQ(stats.associated_measurements, 1u);
    EXPECT_NEAR(stats.max_measurement_mass, 2 * expect, 1e-14);
}

TEST(PhdFilter, UpdateMassBoundAndSaturation) {
    Fixture f;
    Rng rng(4);
    ParticleCloud c = initialize(f.config, f.spec.grid, 3000, 50.0, rng);
    const Eigen::Vector4d a(89000, -200, 0, 0);
    std::vector<Eigen::Vector4d> many(200, a);
    const ParticleCloud dense = f.cloud_at(many, 1.0);
    MeasurementSet z{f.theta, 1, {f.measurement_at(a, 6.0)}};
    const ParticleCloud u = update_plain(dense, z, f.context());
    EXPECT_LT(estimate_cardinality(u), 1.0);
    EXPECT_GT(estimate_cardinality(u), 0.999);

    MeasurementSet zs{f.theta, 1, {}};
    for (int k = 0; k < 40; ++k) {
        const Eigen::Vector4d s(80000 + 250.0 * k, -400 + 25.0 * (k % 10), 0, 0);
        zs.elements.push_back(f.measurement_at(s, 0.3 + 0.05 * k));
    }
    const ParticleCloud v = update_plain(c, zs, f.context());
    EXPECT_LE(estimate_cardinality(v), static_cast<double>(zs.size()));
    EXPECT_TRUE(v.weights().allFinite());
}

TEST(PhdFilter, EmptyMeasurementSetZeroesWeights) {
    Fixture f;
    const ParticleCloud c = f.cloud_at({{89000, -200, 0, 0}}, 1.0);
    UpdateStats stats;
    const ParticleCloud u = update_plain(c, MeasurementSet{f.theta, 1, {}}, f.context(), &stats);
    EXPECT_EQ(estimate_cardinality(u), 0.0);
    EXPECT_TRUE(stats.empty_measurement_set);
}

TEST(PhdFilter, ShrinkageIdentityTableEqualsPlain) {
    Fixture f;
    Rng rng(6);
    const ParticleCloud c = predict(initialize(f.config, f.spec.grid, 2000, 2.0, rng), f.config, f.spec.grid, 1.0, rng);
    MeasurementSet z{f.theta, 1, {}};
    for (int k = 0; k < 300; ++k) {
        const Eigen::Vector4d s(80000 + 33.0 * k, -400 + 25.0 * (k % 10), 0, 0);
        z.elements.push_back(f.measurement_at(s, f.theta + 0.01 * k));
    }
    const ParticleCloud p = update_plain(c, z, f.context());
    const ParticleCloud s = update_shrinkage(c, z, f.context(), ShrinkageTable::identity());
    EXPECT_EQ(p.weights(), s.weights());
}

TEST(PhdFilter, ShrinkageRaisesWeightOnStrongMeasurement) {
    Fixture f;
    const Eigen::Vector4d a(89000, -200, 0, 0), b(89005, -201, 0, 0);
    const ParticleCloud c = f.cloud_at({a, b}, 0.1);
    MeasurementSet z{f.theta, 1, {f.measurement_at(a, 1.5)}};
    const ShrinkageTable table({{6.0, 0.7}, {13.0, 0.7}});
    const ParticleCloud p = update_plain(c, z, f.context());
    const ParticleCloud s = update_shrinkage(c, z, f.context(), table);
    EXPECT_GT(s.weights()(0), p.weights()(0));
    EXPECT_GT(s.weights()(1), p.weights()(1));
}

TEST(PhdFilter, PermutationInvariance) {
    Fixture f;
    Rng rng(7);
    const ParticleCloud c = predict(initialize(f.config, f.spec.grid, 2000, 2.0, rng), f.config, f.spec.grid, 1.0, rng);
    MeasurementSet z{f.theta, 1, {}};
    for (int k = 0; k < 400; ++k) {
        const Eigen::Vector4d s(80000 + 25.0 * k, -400 + 25.0 * (k % 10), 0, 0);
        z.elements.push_back(f.measurement_at(s, f.theta + 0.004 * k));
    }
    std::vector<Eigen::Index> perm(c.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    ParticleCloud::StateMatrix ps(5, static_cast<Eigen::Index>(c.size()));
    Eigen::VectorXd pw(static_cast<Eigen::Index>(c.size()));
    for (std::size_t k = 0; k < perm.size(); ++k) {
        ps.col(static_cast<Eigen::Index>(k)) = c.states().col(perm[k]);
        pw(static_cast<Eigen::Index>(k)) = c.weights()(perm[k]);
    }
    const ParticleCloud shuffled(ps, pw, c.step(), c.persistent_count(), c.birth_count());
    const ParticleCloud u1 = update_plain(c, z, f.context());
    const ParticleCloud u2 = update_plain(shuffled, z, f.context());
    for (std::size_t k = 0; k < perm.size(); ++k) {
        const double w1 = u1.weights()(perm[k]);
        EXPECT_NEAR(u2.weights()(static_cast<Eigen::Index>(k)), w1, 1e-9 * std::max(w1, 1e-300));
    }
    const double n1 = estimate_cardinality(u1);
    EXPECT_NEAR(estimate_cardinality(u2), n1, 1e-9 * n1);
}

TEST(PhdFilter, ResampleConservesMass) {
    Fixture f;
    Rng rng(8);
    const ParticleCloud single = f.cloud_at({{89000, -200, 0, 0}}, 1.7);
    const ParticleCloud r = resample(single, 2000, rng);
    EXPECT_EQ(r.size(), 2000u);
    EXPECT_DOUBLE_EQ(estimate_cardinality(r), 1.7);
    for (Eigen::Index i = 0; i < 2000; ++i) EXPECT_EQ(r.states().col(i), single.states().col(0));

    const ParticleCloud c = predict(initialize(f.config, f.spec.grid, 1000, 3.0, rng), f.config, f.spec.grid, 1.0, rng);
    const ParticleCloud rc = resample(c, 2000, rng);
    EXPECT_DOUBLE_EQ(estimate_cardinality(rc), estimate_cardinality(c));
    EXPECT_TRUE(resample(update_plain(c, MeasurementSet{f.theta, 1, {}}, f.context()), 2000, rng).empty());
}

TEST(PhdFilter, ResampleIsUnbiased) {
    Fixture f;
    std::vector<Eigen::Vector4d> states;
    for (int k = 0; k < 5; ++k) states.emplace_back(80000 + 100.0 * k, -300, 0, 0);
    ParticleCloud c = f.cloud_at(states, 1.0);
    const Eigen::VectorXd w = (Eigen::VectorXd(5) << 0.05, 0.4, 0.15, 0.3, 0.1).finished();
    c = ParticleCloud(c.states(), w, 1, 5, 0);
    const std::size_t l = 20;
    const int reps = 10000;
    Eigen::VectorXd copies = Eigen::VectorXd::Zero(5);
    Rng rng(9);
    for (int r = 0; r < reps; ++r) {
        const ParticleCloud out = resample(c, l, rng);
        for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(l); ++i)
            for (Eigen::Index k = 0; k < 5; ++k)
                if (out.states()(0, i) == c.states()(0, k)) copies(k) += 1.0;
    }
    copies /= reps;
    for (Eigen::Index k = 0; k < 5; ++k) {
        const double expect = static_cast<double>(l) * w(k);
        const double sd = std::sqrt(static_cast<double>(l) * w(k) * (1 - w(k)) / reps);
        EXPECT_NEAR(copies(k), expect, 3 * sd) << k;
    }
}

TEST(PhdFilter, StepRunsAndIsReproducible) {
    Fixture f;
    Rng truth_rng(1), frame_rng(2);
    const auto tracks = generate_scenario(f.spec, truth_rng);
    std::vector<PowerFrame> frames;
    for (int k = 1; k <= 20; ++k) frames.push_back(render_frame(truth_at(tracks, k), f.spec.grid, kSigma0, k, frame_rng));

    auto run = [&](UpdateMode mode, const ShrinkageTable& table) {
        FilterConfig cfg = f.config;
        cfg.mode = mode;
        cfg.table = table;
        PhdFilter filter(cfg, f.spec.grid, kSigma0, 1.0);
        Rng rng(3), xrng(4);
        std::vector<StepOutput> out;
        for (const auto& fr : frames) out.push_back(filter.step(fr, rng, xrng));
        return out;
    };
    const auto a = run(UpdateMode::plain, {});
    const auto b = run(UpdateMode::shrinkage, ShrinkageTable::identity());
    const auto c = run(UpdateMode::plain, {});
    ASSERT_EQ(a.size(), 20u);
    for (std::size_t k = 0; k < a.size(); ++k) {
        EXPECT_EQ(a[k].diagnostics.step, static_cast<int>(k) + 1);
        EXPECT_FALSE(a[k].estimates.empty());
        EXPECT_EQ(a[k].diagnostics.n_hat, b[k].diagnostics.n_hat);
        EXPECT_EQ(a[k].diagnostics.n_hat, c[k].diagnostics.n_hat);
        ASSERT_EQ(a[k].estimates.size(), b[k].estimates.size());
        for (std::size_t j = 0; j < a[k].estimates.size(); ++j)
            EXPECT_EQ(a[k].estimates[j].kinematics, b[k].estimates[j].kinematics);
        EXPECT_LE(a[k].diagnostics.n_hat, static_cast<double>(a[k].diagnostics.measurements));
    }
}

TEST(PhdFilter, ConfigValidation) {
    FilterConfig cfg;
    cfg.survival = 1.5;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = FilterConfig{};
    cfg.intensity = IntensityPrior::range(2.0, 1.0);
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    const std::vector<double> same{0.9, 0.9};
    EXPECT_EQ(IntensityPrior::from_set(same).kind, IntensityPrior::Kind::known);
}
