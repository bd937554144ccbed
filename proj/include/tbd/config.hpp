#pragma once

#include "tbd/phd_filter.hpp"
#include "tbd/scenario.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tbd {

enum class RunMode { plain, shrinkage, both };

RunMode parse_run_mode(const std::string& s);
std::string to_string(RunMode mode);

/// Filter parameters as configured; the intensity prior and shrinkage table
/// are derived from the scenario at run time.
struct FilterSettings {
    double survival = 0.99;
    std::size_t particle_count = 2000;
    std::size_t birth_count = 800;
    double birth_mass = 0.2;
    double spawn_mass = 0.05;
    double spawn_position_std = 0.0;
    double spawn_velocity_std = 0.0;
    double accel_noise_std = 1.0;
    double intensity_jitter = 0.02;
    double pd_target = 0.99;
    double beta = 0.05;
    ClutterDensity clutter = ClutterDensity::scan;
    std::vector<double> table_snr_grid{6, 7, 8, 9, 10, 11, 12, 13};
    bool force_identity_table = false;
};

struct RunConfig {
    static constexpr int kSchemaVersion = 1;

    ScenarioSpec scenario = scenario_preset("spawn");
    std::optional<std::string> preset{"spawn"};
    std::optional<double> snr_db;  ///< overrides every target's SNR
    FilterSettings filter;
    int trials = 25;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    RunMode mode = RunMode::both;
    bool record_timing = false;
    int threads = 0;  ///< 0 selects the hardware concurrency
    std::vector<double> sweep_snr_db{6, 7, 8, 9, 10, 11, 12, 13};

    /// Scenario with the SNR override applied.
    [[nodiscard]] ScenarioSpec effective_scenario() const;
    void validate() const;
};

/// Parses a configuration document. Errors are ConfigError with a dotted
/// field path such as "filter.particle_count".
RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::string& path);
nlohmann::json to_json(const RunConfig& config);

nlohmann::json scenario_to_json(const ScenarioSpec& spec);
ScenarioSpec scenario_from_json(const nlohmann::json& doc, const std::string& path = "scenario");

/// FilterConfig for one algorithm on a scenario. The table argument is
/// ignored in plain mode.
FilterConfig make_filter_config(const FilterSettings& settings, const ScenarioSpec& scenario, UpdateMode mode,
                                const ShrinkageTable& table);

}  // namespace tbd
