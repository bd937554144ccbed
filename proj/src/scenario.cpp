#include "tbd/scenario.hpp"

#include "tbd/dynamics.hpp"
#include "tbd/rician.hpp"

#include <algorithm>

namespace tbd {

double SnrSchedule::at(int step) const {
    double snr = segments.front().snr_db;
    for (const auto& s : segments)
        if (s.from_step <= step) snr = s.snr_db;
    return snr;
}

double SnrSchedule::min_snr() const {
    return std::min_element(segments.begin(), segments.end(),
                            [](const auto& a, const auto& b) { return a.snr_db < b.snr_db; })
        ->snr_db;
}

double SnrSchedule::max_snr() const {
    return std::max_element(segments.begin(), segments.end(),
                            [](const auto& a, const auto& b) { return a.snr_db < b.snr_db; })
        ->snr_db;
}

namespace {

void check_schedule(const SnrSchedule& s, const std::string& where) {
    if (s.segments.empty()) throw ConfigError(where + ".snr: schedule is empty");
    int prev = 0;
    for (const auto& seg : s.segments) {
        if (seg.from_step <= prev) throw ConfigError(where + ".snr: segment steps must increase");
        prev = seg.from_step;
    }
}

}  // namespace

void ScenarioSpec::validate() const {
    if (!(sigma0 > 0.0)) throw ConfigError("scenario.sigma0: must be positive");
    if (duration < 1) throw ConfigError("scenario.duration: must be >= 1");
    if (!(dt > 0.0)) throw ConfigError("scenario.dt: must be positive");
    if (accel_noise_std < 0.0) throw ConfigError("scenario.accel_noise_std: must be >= 0");
    for (std::size_t e = 0; e < events.size(); ++e) {
        const std::string where = "scenario.events[" + std::to_string(e) + "]";
        std::visit([&](const auto& ev) {
            if (ev.step < 1 || ev.step > duration) throw ConfigError(where + ".step: outside [1, duration]");
            if (ev.death_step && *ev.death_step <= ev.step)
                throw ConfigError(where + ".death_step: must follow the birth step");
            check_schedule(ev.snr, where);
        }, events[e]);
    }
    if (snr_mode == SnrMode::unknown_range && !(snr_high >= snr_low))
        throw ConfigError("scenario.snr_range: high must be >= low");
}

std::vector<double> ScenarioSpec::all_snrs() const {
    std::vector<double> out;
    for (const auto& ev : events)
        std::visit([&](const auto& e) {
            for (const auto& seg : e.snr.segments) out.push_back(seg.snr_db);
        }, ev);
    return out;
}

void ScenarioSpec::set_uniform_snr(double snr_db) {
    for (auto& ev : events) std::visit([&](auto& e) { e.snr = SnrSchedule::constant(snr_db); }, ev);
    if (snr_mode == SnrMode::unknown_range) {
        const double width = snr_high - snr_low;
        snr_low = snr_db - 0.5 * width;
        snr_high = snr_db + 0.5 * width;
    }
}

std::vector<TruthTrack> generate_scenario(const ScenarioSpec& spec, Rng& rng) {
    spec.validate();
    std::vector<TruthTrack> tracks;
    std::vector<const SnrSchedule*> schedules;

    auto amplitude = [&](const SnrSchedule& s, int step) {
        return snr_to_intensity(s.at(step), spec.sigma0);
    };

    for (int step = 1; step <= spec.duration; ++step) {
        for (std::size_t t = 0; t < tracks.size(); ++t) {
            auto& track = tracks[t];
            if (!track.alive_at(step) || step == track.birth_step) continue;
            TargetState next = cv_transition(track.states.back(), spec.dt, spec.accel_noise_std, rng);
            next.intensity = amplitude(*schedules[t], step);
            track.states.push_back(next);
            track.in_grid.push_back(state_to_cell(next.kinematics, spec.grid).has_value());
        }
        for (std::size_t e = 0; e < spec.events.size(); ++e) {
            const auto& ev = spec.events[e];
            TruthTrack track;
            const SnrSchedule* schedule = nullptr;
            if (const auto* birth = std::get_if<BirthEvent>(&ev)) {
                if (birth->step != step) continue;
                track.birth_step = step;
                track.death_step = birth->death_step.value_or(spec.duration + 1);
                TargetState s = birth->state;
                s.intensity = amplitude(birth->snr, step);
                track.states.push_back(s);
                schedule = &birth->snr;
            } else {
                const auto& spawn = std::get<SpawnEvent>(ev);
                if (spawn.step != step) continue;
                if (spawn.parent_id < 0 || spawn.parent_id >= static_cast<int>(tracks.size()) ||
                    !tracks[static_cast<std::size_t>(spawn.parent_id)].alive_at(step))
                    throw ConfigError("scenario.events[" + std::to_string(e) + "].parent: target " +
                                      std::to_string(spawn.parent_id) + " is not alive at step " +
                                      std::to_string(step));
                const auto& parent = tracks[static_cast<std::size_t>(spawn.parent_id)].at(step);
                TargetState s = parent;
                s.kinematics(1) += spawn.dvx;
                s.kinematics(3) += spawn.dvy;
                s.intensity = amplitude(spawn.snr, step);
                track.birth_step = step;
                track.death_step = spawn.death_step.value_or(spec.duration + 1);
                track.states.push_back(s);
                schedule = &spawn.snr;
            }
            track.id = static_cast<int>(tracks.size());
            track.in_grid.push_back(state_to_cell(track.states.back().kinematics, spec.grid).has_value());
            tracks.push_back(std::move(track));
            schedules.push_back(schedule);
        }
    }
    return tracks;
}

std::vector<TargetState> truth_at(const std::vector<TruthTrack>& tracks, int step) {
    std::vector<TargetState> out;
    for (const auto& t : tracks)
        if (t.alive_at(step)) out.push_back(t.at(step));
    return out;
}

namespace {

// 200 x 50 m range cells and 10 x 25 m/s Doppler cells with centers on
// 80000 + 50 i and -400 + 25 j, one bearing cell around boresight.
ScenarioSpec preset_base(const std::string& name) {
    ScenarioSpec spec;
    spec.name = name;
    spec.grid = GridSpec(79975.0, 89975.0, 200, -412.5, -162.5, 10, -0.005, 0.005, 1);
    spec.sigma0 = 0.25;
    spec.duration = 20;
    spec.dt = 1.0;
    spec.accel_noise_std = 0.0;
    return spec;
}

}  // namespace

ScenarioSpec scenario_preset(const std::string& name) {
    if (name == "spawn") {
        auto spec = preset_base(name);
        spec.events.push_back(BirthEvent{1, TargetState(89000.0, -200.0, 0.0, 0.0), SnrSchedule::constant(9.0), {}});
        spec.events.push_back(SpawnEvent{10, 0, -100.0, 0.0, SnrSchedule::constant(9.0), {}});
        spec.snr_mode = SnrMode::known;
        return spec;
    }
    if (name == "spawn-birth") {
        auto spec = preset_base(name);
        spec.events.push_back(BirthEvent{1, TargetState(89000.0, -200.0, 0.0, 0.0), SnrSchedule::constant(8.0), {}});
        spec.events.push_back(SpawnEvent{7, 0, -100.0, 0.0, SnrSchedule::constant(9.0), {}});
        spec.events.push_back(BirthEvent{13, TargetState(89000.0, -250.0, 0.0, 0.0), SnrSchedule::constant(10.0), {}});
        spec.snr_mode = SnrMode::per_target;
        return spec;
    }
    if (name == "snr-change") {
        auto spec = preset_base(name);
        spec.events.push_back(BirthEvent{1, TargetState(89000.0, -200.0, 0.0, 0.0), SnrSchedule::constant(9.0), {}});
        spec.events.push_back(SpawnEvent{10, 0, -100.0, 0.0, SnrSchedule{{{1, 9.0}, {12, 10.0}}}, {}});
        spec.snr_mode = SnrMode::unknown_range;
        spec.snr_low = 8.0;
        spec.snr_high = 11.0;
        return spec;
    }
    throw ConfigError("scenario.preset: unknown preset '" + name + "'");
}

std::vector<std::string> preset_names() { return {"spawn", "spawn-birth", "snr-change"}; }

}  // namespace tbd
