#pragma once

#include "tbd/frame.hpp"
#include "tbd/grid.hpp"
#include "tbd/rng.hpp"
#include "tbd/shrinkage.hpp"
#include "tbd/target_state.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <vector>

namespace tbd {

/// What the filter assumes about target amplitudes.
struct IntensityPrior {
    enum class Kind {
        known,  ///< every target has amplitude `low`
        set,    ///< amplitudes drawn from [min, max] of a known set
        range,  ///< amplitudes unknown within [low, high]
    };
    Kind kind = Kind::known;
    double low = 1.0;
    double high = 1.0;

    static IntensityPrior known(double amplitude) { return {Kind::known, amplitude, amplitude}; }
    static IntensityPrior from_set(std::span<const double> amplitudes);
    static IntensityPrior range(double lo, double hi) { return {Kind::range, lo, hi}; }

    [[nodiscard]] bool estimated() const { return kind != Kind::known && high > low; }
};

enum class UpdateMode { plain, shrinkage };

/// Normalization of the clutter intensity in the update denominator.
enum class ClutterDensity {
    scan,      ///< lambda * p0*(z): clutter rate of the whole scan
    per_cell,  ///< lambda / N * p0*(z): rate per resolution cell
};

struct FilterConfig {
    double survival = 0.99;
    std::size_t particle_count = 2000;  ///< L_k after resampling
    std::size_t birth_count = 800;      ///< J_k per scan
    double birth_mass = 0.2;            ///< expected births per scan
    double spawn_mass = 0.05;           ///< expected spawns per target per scan
    double spawn_position_std = 0.0;    ///< 0 selects half a range cell
    double spawn_velocity_std = 0.0;    ///< 0 selects one Doppler cell
    double accel_noise_std = 1.0;       ///< proposal process noise (m/s^2)
    double intensity_jitter = 0.02;     ///< relative std per scan, estimated amplitudes only
    double pd_target = 0.99;
    IntensityPrior intensity;
    UpdateMode mode = UpdateMode::shrinkage;
    ShrinkageTable table;
    ClutterDensity clutter = ClutterDensity::scan;

    void validate() const;
};

struct Particle {
    TargetState state;
    double weight = 0.0;
};

/// Weighted particle approximation of the PHD. Columns of `states` are
/// [x, vx, y, vy, I].
class ParticleCloud {
public:
    using StateMatrix = Eigen::Matrix<double, 5, Eigen::Dynamic>;

    ParticleCloud() = default;
    ParticleCloud(StateMatrix states, Eigen::VectorXd weights, int step = 0,
                  std::size_t persistent = 0, std::size_t born = 0);

    [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(weights_.size()); }
    [[nodiscard]] bool empty() const { return weights_.size() == 0; }
    [[nodiscard]] const StateMatrix& states() const { return states_; }
    [[nodiscard]] const Eigen::VectorXd& weights() const { return weights_; }
    [[nodiscard]] int step() const { return step_; }
    [[nodiscard]] std::size_t persistent_count() const { return persistent_; }
    [[nodiscard]] std::size_t birth_count() const { return born_; }
    [[nodiscard]] Particle particle(std::size_t i) const;

private:
    StateMatrix states_;
    Eigen::VectorXd weights_;
    int step_ = 0;
    std::size_t persistent_ = 0;
    std::size_t born_ = 0;
};

/// Sum of weights: the expected number of targets.
double estimate_cardinality(const ParticleCloud& cloud);

/// Effective sample size of the normalized weights.
double effective_sample_size(const ParticleCloud& cloud);

/// Either an empty cloud (count == 0) or `count` particles drawn from the
/// birth density sharing `total_mass`.
ParticleCloud initialize(const FilterConfig& config, const GridSpec& grid, std::size_t count,
                         double total_mass, Rng& rng);

/// Moves persistent particles through the CV / spawn mixture proposal and
/// appends J new birth particles.
ParticleCloud predict(const ParticleCloud& cloud, const FilterConfig& config, const GridSpec& grid,
                      double dt, Rng& rng);

/// Single-measurement likelihood: the Rician density of the measured power
/// when the particle falls in the measurement's cell, zero otherwise.
double measurement_likelihood(const Measurement& m, const Particle& p, const GridSpec& grid, double sigma0);

struct UpdateContext {
    const GridSpec* grid = nullptr;
    double sigma0 = 0.25;
    double theta = 0.0;
    double lambda = 0.0;
    ClutterDensity clutter = ClutterDensity::scan;
};

struct UpdateStats {
    std::size_t measurements = 0;
    std::size_t associated_measurements = 0;  ///< measurements with at least one particle in their cell
    double max_measurement_mass = 0.0;
    bool empty_measurement_set = false;
};

/// PHD update with p_D = 1 and clutter lambda * p0*(z; sigma0).
ParticleCloud update_plain(const ParticleCloud& predicted, const MeasurementSet& z, const UpdateContext& ctx,
                           UpdateStats* stats = nullptr);

/// As update_plain, but the clutter density of each particle uses the
/// shrunk scale sigma_s^M looked up from its amplitude.
ParticleCloud update_shrinkage(const ParticleCloud& predicted, const MeasurementSet& z, const UpdateContext& ctx,
                               const ShrinkageTable& table, UpdateStats* stats = nullptr);

/// Systematic resampling to `count` particles of equal weight W / count.
/// A cloud with zero total weight resamples to an empty cloud.
ParticleCloud resample(const ParticleCloud& cloud, std::size_t count, Rng& rng);

struct StepDiagnostics {
    int step = 0;
    double n_hat = 0.0;
    std::size_t measurements = 0;
    double ess = 0.0;
    double max_measurement_mass = 0.0;
    bool empty_measurement_set = false;
    bool components_reduced = false;
    double wall_ms = 0.0;
};

struct StepOutput {
    std::vector<TargetState> estimates;
    StepDiagnostics diagnostics;
};

/// Owns the particle cloud and runs predict, update, resample and state
/// extraction once per scan.
class PhdFilter {
public:
    PhdFilter(FilterConfig config, GridSpec grid, double sigma0, double dt);

    StepOutput step(const MeasurementSet& z, Rng& rng, Rng& extraction_rng);
    StepOutput step(const PowerFrame& frame, Rng& rng, Rng& extraction_rng);

    [[nodiscard]] double threshold() const { return theta_; }
    [[nodiscard]] double clutter_rate() const { return lambda_; }
    [[nodiscard]] const ParticleCloud& cloud() const { return cloud_; }
    [[nodiscard]] const FilterConfig& config() const { return config_; }
    [[nodiscard]] const GridSpec& grid() const { return grid_; }

private:
    FilterConfig config_;
    GridSpec grid_;
    double sigma0_;
    double dt_;
    double theta_;
    double lambda_;
    ParticleCloud cloud_;
    int step_ = 0;
};

}  // namespace tbd
