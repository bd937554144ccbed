#pragma once

#include "tbd/grid.hpp"
#include "tbd/rng.hpp"
#include "tbd/target_state.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace tbd {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Piecewise-constant SNR: entry k applies from its step until the next entry.
struct SnrSchedule {
    struct Segment {
        int from_step = 1;
        double snr_db = 0.0;
    };
    std::vector<Segment> segments;

    static SnrSchedule constant(double snr_db) { return {{{1, snr_db}}}; }
    [[nodiscard]] double at(int step) const;
    [[nodiscard]] double min_snr() const;
    [[nodiscard]] double max_snr() const;
};

struct BirthEvent {
    int step = 1;
    TargetState state;
    SnrSchedule snr;
    std::optional<int> death_step;
};

/// A child target appearing at the parent's position with the parent's
/// velocity plus an offset.
struct SpawnEvent {
    int step = 1;
    int parent_id = 0;
    double dvx = 0.0;
    double dvy = 0.0;
    SnrSchedule snr;
    std::optional<int> death_step;
};

using ScenarioEvent = std::variant<BirthEvent, SpawnEvent>;

/// How much the filter is told about target SNRs.
enum class SnrMode { known, per_target, unknown_range };

struct ScenarioSpec {
    std::string name = "custom";
    GridSpec grid{79975.0, 89975.0, 200, -412.5, -162.5, 10, -0.005, 0.005, 1};
    double sigma0 = 0.25;
    int duration = 20;
    double dt = 1.0;
    double accel_noise_std = 1.0;
    std::vector<ScenarioEvent> events;
    SnrMode snr_mode = SnrMode::known;
    double snr_low = 0.0;   // unknown_range only
    double snr_high = 0.0;  // unknown_range only

    /// Throws ConfigError on out-of-range steps or malformed schedules.
    void validate() const;
    /// SNRs (dB) of every target over the whole run.
    [[nodiscard]] std::vector<double> all_snrs() const;
    /// Replaces every schedule with a constant SNR.
    void set_uniform_snr(double snr_db);
};

struct TruthTrack {
    int id = 0;
    int birth_step = 1;
    int death_step = 0;  // first step the track no longer exists
    std::vector<TargetState> states;  // states[k - birth_step]
    std::vector<bool> in_grid;

    [[nodiscard]] bool alive_at(int step) const { return step >= birth_step && step < death_step; }
    [[nodiscard]] const TargetState& at(int step) const { return states.at(static_cast<std::size_t>(step - birth_step)); }
};

/// Deterministic given (spec, rng state). Track ids follow event order.
std::vector<TruthTrack> generate_scenario(const ScenarioSpec& spec, Rng& rng);

/// Live truth states at a step.
std::vector<TargetState> truth_at(const std::vector<TruthTrack>& tracks, int step);

/// Built-in scenarios: "spawn", "spawn-birth", "snr-change".
ScenarioSpec scenario_preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace tbd
