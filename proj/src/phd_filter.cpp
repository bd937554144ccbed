#include "tbd/phd_filter.hpp"

#include "tbd/dynamics.hpp"
#include "tbd/extraction.hpp"
#include "tbd/rician.hpp"
#include "tbd/summation.hpp"
#include "tbd/threshold.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace tbd {

IntensityPrior IntensityPrior::from_set(std::span<const double> amplitudes) {
    if (amplitudes.empty()) throw std::invalid_argument("IntensityPrior::from_set: empty set");
    const auto [lo, hi] = std::minmax_element(amplitudes.begin(), amplitudes.end());
    return {*lo == *hi ? Kind::known : Kind::set, *lo, *hi};
}

void FilterConfig::validate() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument("FilterConfig: " + what); };
    if (!(survival > 0.0 && survival <= 1.0)) fail("survival must lie in (0, 1]");
    if (particle_count == 0) fail("particle_count must be positive");
    if (birth_count == 0) fail("birth_count must be positive");
    if (!(birth_mass > 0.0)) fail("birth_mass must be positive");
    if (!(spawn_mass >= 0.0)) fail("spawn_mass must be nonnegative");
    if (!(spawn_position_std >= 0.0) || !(spawn_velocity_std >= 0.0)) fail("spawn stds must be nonnegative");
    if (!(accel_noise_std >= 0.0)) fail("accel_noise_std must be nonnegative");
    if (!(intensity_jitter >= 0.0)) fail("intensity_jitter must be nonnegative");
    if (!(pd_target > 0.0 && pd_target < 1.0)) fail("pd_target must lie in (0, 1)");
    if (!(intensity.low > 0.0) || intensity.high < intensity.low) fail("intensity prior must satisfy 0 < low <= high");
}

ParticleCloud::ParticleCloud(StateMatrix states, Eigen::VectorXd weights, int step, std::size_t persistent,
                             std::size_t born)
    : states_(std::move(states)), weights_(std::move(weights)), step_(step), persistent_(persistent), born_(born) {
    if (states_.cols() != weights_.size()) throw std::invalid_argument("ParticleCloud: size mismatch");
}

Particle ParticleCloud::particle(std::size_t i) const {
    const auto c = states_.col(static_cast<Eigen::Index>(i));
    return {TargetState(c(0), c(1), c(2), c(3), c(4)), weights_(static_cast<Eigen::Index>(i))};
}

double estimate_cardinality(const ParticleCloud& cloud) {
    const auto& w = cloud.weights();
    return pairwise_sum(std::span<const double>(w.data(), static_cast<std::size_t>(w.size())));
}

double effective_sample_size(const ParticleCloud& cloud) {
    const double total = estimate_cardinality(cloud);
    const double sq = cloud.weights().squaredNorm();
    if (!(sq > 0.0)) return 0.0;
    return total * total / sq;
}

namespace {

double draw_intensity(const IntensityPrior& prior, Rng& rng) {
    if (!prior.estimated()) return prior.low;
    std::uniform_real_distribution<double> u(prior.low, prior.high);
    return u(rng);
}

Eigen::Matrix<double, 5, 1> draw_birth(const IntensityPrior& prior, const GridSpec& grid, Rng& rng) {
    std::uniform_real_distribution<double> ur(grid.r_min(), grid.r_max());
    std::uniform_real_distribution<double> ud(grid.d_min(), grid.d_max());
    std::uniform_real_distribution<double> ub(grid.b_min(), grid.b_max());
    const double r = ur(rng);
    const double d = ud(rng);
    const double b = ub(rng);
    Eigen::Matrix<double, 5, 1> s;
    s << r * std::cos(b), d * std::cos(b), r * std::sin(b), d * std::sin(b), draw_intensity(prior, rng);
    return s;
}

}  // namespace

ParticleCloud initialize(const FilterConfig& config, const GridSpec& grid, std::size_t count, double total_mass,
                         Rng& rng) {
    ParticleCloud::StateMatrix states(5, static_cast<Eigen::Index>(count));
    for (std::size_t i = 0; i < count; ++i)
        states.col(static_cast<Eigen::Index>(i)) = draw_birth(config.intensity, grid, rng);
    Eigen::VectorXd w = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(count),
                                                  count > 0 ? total_mass / static_cast<double>(count) : 0.0);
    return ParticleCloud(std::move(states), std::move(w), 0, 0, count);
}

ParticleCloud predict(const ParticleCloud& cloud, const FilterConfig& config, const GridSpec& grid, double dt,
                      Rng& rng) {
    if (!(dt > 0.0)) throw std::invalid_argument("predict: dt must be positive");
    const auto n = static_cast<Eigen::Index>(cloud.size());
    const auto j = static_cast<Eigen::Index>(config.birth_count);
    const Eigen::Matrix4d f = cv_transition_matrix(dt);
    const double pos_std = config.spawn_position_std > 0.0 ? config.spawn_position_std : 0.5 * grid.range_cell();
    const double vel_std = config.spawn_velocity_std > 0.0 ? config.spawn_velocity_std : grid.doppler_cell();
    const double scale = config.survival + config.spawn_mass;
    const double p_spawn = config.spawn_mass / scale;

    ParticleCloud::StateMatrix out(5, n + j);
    Eigen::VectorXd w(n + j);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::normal_distribution<double> std_normal(0.0, 1.0);
    const auto& prior = config.intensity;

    for (Eigen::Index i = 0; i < n; ++i) {
        const auto src = cloud.states().col(i);
        Eigen::Vector4d kin = f * src.head<4>();
        if (u01(rng) < p_spawn) {
            kin += Eigen::Vector4d(pos_std * std_normal(rng), vel_std * std_normal(rng),
                                   pos_std * std_normal(rng), vel_std * std_normal(rng));
        } else if (config.accel_noise_std > 0.0) {
            const double ax = config.accel_noise_std * std_normal(rng);
            const double ay = config.accel_noise_std * std_normal(rng);
            kin += Eigen::Vector4d(0.5 * dt * dt * ax, dt * ax, 0.5 * dt * dt * ay, dt * ay);
        }
        double amp = src(4);
        if (prior.estimated() && config.intensity_jitter > 0.0) {
            amp *= 1.0 + config.intensity_jitter * std_normal(rng);
            amp = std::clamp(amp, prior.low, prior.high);
        }
        out.col(i).head<4>() = kin;
        out(4, i) = amp;
        w(i) = cloud.weights()(i) * scale;
    }
    const double birth_w = config.birth_mass / static_cast<double>(j);
    for (Eigen::Index b = 0; b < j; ++b) {
        out.col(n + b) = draw_birth(prior, grid, rng);
        w(n + b) = birth_w;
    }
    return ParticleCloud(std::move(out), std::move(w), cloud.step() + 1, static_cast<std::size_t>(n),
                         static_cast<std::size_t>(j));
}

double measurement_likelihood(const Measurement& m, const Particle& p, const GridSpec& grid, double sigma0) {
    if (!p.state.intensity) throw std::invalid_argument("measurement_likelihood: particle has no intensity");
    const auto cell = state_to_cell(p.state.kinematics, grid);
    if (!cell || !(*cell == m.cell)) return 0.0;
    return target_likelihood(m.power, *p.state.intensity, sigma0);
}

namespace {

ParticleCloud update_impl(const ParticleCloud& predicted, const MeasurementSet& z, const UpdateContext& ctx,
                          const ShrinkageTable* table, UpdateStats* stats) {
    if (ctx.grid == nullptr) throw std::invalid_argument("update: missing grid");
    const GridSpec& grid = *ctx.grid;
    const auto n = static_cast<Eigen::Index>(predicted.size());
    const auto nz = z.elements.size();
    UpdateStats local;
    local.measurements = nz;
    local.empty_measurement_set = nz == 0;

    std::vector<int> cell_to_meas(grid.size(), -1);
    for (std::size_t m = 0; m < nz; ++m) {
        const auto& meas = z.elements[m];
        if (meas.power < ctx.theta) throw std::invalid_argument("update: measurement below threshold");
        cell_to_meas[grid.flat(meas.cell)] = static_cast<int>(m);
    }

    constexpr double kNegInf = -std::numeric_limits<double>::infinity();
    std::vector<int> assoc(static_cast<std::size_t>(n), -1);
    std::vector<double> log_gw(static_cast<std::size_t>(n), kNegInf);
    std::vector<double> peak(nz, kNegInf);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double w = predicted.weights()(i);
        if (!(w > 0.0) || nz == 0) continue;
        const auto col = predicted.states().col(i);
        const auto cell = state_to_cell(Eigen::Vector4d(col.head<4>()), grid);
        if (!cell) continue;
        const int m = cell_to_meas[grid.flat(*cell)];
        if (m < 0) continue;
        const auto k = static_cast<std::size_t>(i);
        assoc[k] = m;
        log_gw[k] = log_target_likelihood(z.elements[static_cast<std::size_t>(m)].power, col(4), ctx.sigma0) +
                    std::log(w);
        peak[static_cast<std::size_t>(m)] = std::max(peak[static_cast<std::size_t>(m)], log_gw[k]);
    }
    std::vector<double> scaled_sum(nz, 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        if (assoc[k] < 0) continue;
        const auto m = static_cast<std::size_t>(assoc[k]);
        scaled_sum[m] += std::exp(log_gw[k] - peak[m]);
    }

    double lambda = ctx.lambda;
    if (ctx.clutter == ClutterDensity::per_cell) lambda /= static_cast<double>(grid.size());
    const double log_lambda = std::log(lambda);

    Eigen::VectorXd w_out = Eigen::VectorXd::Zero(n);
    std::vector<double> mass(nz, 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        if (assoc[k] < 0) continue;
        const auto m = static_cast<std::size_t>(assoc[k]);
        const double amp = predicted.states()(4, i);
        const double sigma = table ? table->sigma_for_intensity(amp, ctx.sigma0) : ctx.sigma0;
        const double log_kappa = log_lambda + log_truncated_noise_density(z.elements[m].power, sigma, ctx.theta);
        const double denom = std::exp(log_kappa - peak[m]) + scaled_sum[m];
        const double v = std::exp(log_gw[k] - peak[m]) / denom;
        w_out(i) = v;
        mass[m] += v;
    }
    for (std::size_t m = 0; m < nz; ++m) {
        if (peak[m] > kNegInf) ++local.associated_measurements;
        local.max_measurement_mass = std::max(local.max_measurement_mass, mass[m]);
    }
    if (stats) *stats = local;
    return ParticleCloud(predicted.states(), std::move(w_out), predicted.step(), predicted.persistent_count(),
                         predicted.birth_count());
}

}  // namespace

ParticleCloud update_plain(const ParticleCloud& predicted, const MeasurementSet& z, const UpdateContext& ctx,
                           UpdateStats* stats) {
    return update_impl(predicted, z, ctx, nullptr, stats);
}

ParticleCloud update_shrinkage(const ParticleCloud& predicted, const MeasurementSet& z, const UpdateContext& ctx,
                               const ShrinkageTable& table, UpdateStats* stats) {
    return update_impl(predicted, z, ctx, &table, stats);
}

ParticleCloud resample(const ParticleCloud& cloud, std::size_t count, Rng& rng) {
    const double total = estimate_cardinality(cloud);
    if (!(total > 0.0) || count == 0)
        return ParticleCloud(ParticleCloud::StateMatrix(5, 0), Eigen::VectorXd(0), cloud.step(), 0, 0);
    const auto n = static_cast<Eigen::Index>(cloud.size());
    const double step = total / static_cast<double>(count);
    std::uniform_real_distribution<double> u(0.0, step);
    double pointer = u(rng);

    ParticleCloud::StateMatrix out(5, static_cast<Eigen::Index>(count));
    Eigen::Index src = 0;
    double cumulative = cloud.weights()(0);
    for (std::size_t k = 0; k < count; ++k) {
        while (cumulative <= pointer && src + 1 < n) cumulative += cloud.weights()(++src);
        Eigen::Index pick = src;
        while (!(cloud.weights()(pick) > 0.0) && pick > 0) --pick;
        out.col(static_cast<Eigen::Index>(k)) = cloud.states().col(pick);
        pointer += step;
    }
    Eigen::VectorXd w = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(count), step);
    return ParticleCloud(std::move(out), std::move(w), cloud.step(), count, 0);
}

PhdFilter::PhdFilter(FilterConfig config, GridSpec grid, double sigma0, double dt)
    : config_(std::move(config)), grid_(grid), sigma0_(sigma0), dt_(dt) {
    config_.validate();
    if (!(sigma0 > 0.0)) throw std::invalid_argument("PhdFilter: sigma0 must be positive");
    if (!(dt > 0.0)) throw std::invalid_argument("PhdFilter: dt must be positive");
    if (config_.mode == UpdateMode::shrinkage && config_.table.empty()) config_.table = ShrinkageTable::identity();
    theta_ = solve_threshold(config_.intensity.low, sigma0_, config_.pd_target);
    lambda_ = expected_clutter_count(theta_, sigma0_, grid_.size());
    cloud_ = ParticleCloud(ParticleCloud::StateMatrix(5, 0), Eigen::VectorXd(0), 0, 0, 0);
}

StepOutput PhdFilter::step(const PowerFrame& frame, Rng& rng, Rng& extraction_rng) {
    return step(extract_measurement_set(frame, theta_), rng, extraction_rng);
}

StepOutput PhdFilter::step(const MeasurementSet& z, Rng& rng, Rng& extraction_rng) {
    const auto start = std::chrono::steady_clock::now();
    ++step_;
    const ParticleCloud predicted = predict(cloud_, config_, grid_, dt_, rng);

    const UpdateContext ctx{&grid_, sigma0_, theta_, lambda_, config_.clutter};
    UpdateStats stats;
    const ParticleCloud updated = config_.mode == UpdateMode::shrinkage
                                      ? update_shrinkage(predicted, z, ctx, config_.table, &stats)
                                      : update_plain(predicted, z, ctx, &stats);

    StepOutput out;
    auto& d = out.diagnostics;
    d.step = step_;
    d.n_hat = estimate_cardinality(updated);
    d.measurements = stats.measurements;
    d.ess = effective_sample_size(updated);
    d.max_measurement_mass = stats.max_measurement_mass;
    d.empty_measurement_set = stats.empty_measurement_set;

    const auto n_targets = static_cast<std::size_t>(std::max(1.0, std::round(d.n_hat)));
    bool reduced = false;
    out.estimates = extract_states(updated, n_targets, extraction_rng, &reduced);
    d.components_reduced = reduced;

    cloud_ = resample(updated, config_.particle_count, rng);
    d.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return out;
}

}  // namespace tbd
