#include "tbd/config.hpp"

#include "tbd/rician.hpp"

#include <algorithm>
#include <fstream>
#include <type_traits>

namespace tbd {

using nlohmann::json;

RunMode parse_run_mode(const std::string& s) {
    if (s == "plain") return RunMode::plain;
    if (s == "shrinkage") return RunMode::shrinkage;
    if (s == "both") return RunMode::both;
    throw ConfigError("mode: expected plain, shrinkage or both, got '" + s + "'");
}

std::string to_string(RunMode mode) {
    switch (mode) {
        case RunMode::plain: return "plain";
        case RunMode::shrinkage: return "shrinkage";
        case RunMode::both: return "both";
    }
    return "both";
}

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

template <typename T>
T read_as(const json& j, const std::string& path) {
    try {
        if constexpr (std::is_same_v<T, bool>) {
            if (!j.is_boolean()) throw ConfigError(path + ": expected a boolean");
        } else if constexpr (std::is_arithmetic_v<T>) {
            if (!j.is_number()) throw ConfigError(path + ": expected a number");
            if constexpr (std::is_integral_v<T>) {
                if (!j.is_number_integer()) throw ConfigError(path + ": expected an integer");
                if constexpr (std::is_unsigned_v<T>)
                    if (j.is_number_integer() && !j.is_number_unsigned() && j.get<long long>() < 0)
                        throw ConfigError(path + ": expected a nonnegative integer");
            }
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!j.is_string()) throw ConfigError(path + ": expected a string");
        }
        return j.get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

template <typename T>
void read_opt(const json& obj, const std::string& key, const std::string& path, T& out) {
    if (auto it = obj.find(key); it != obj.end()) out = read_as<T>(*it, join(path, key));
}

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> known) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : known) ok = ok || it.key() == k;
        if (!ok) throw ConfigError(join(path, it.key()) + ": unknown field");
    }
}

void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path + ": expected an object");
}

std::vector<double> read_number_list(const json& j, const std::string& path) {
    if (!j.is_array()) throw ConfigError(path + ": expected an array");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(read_as<double>(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

SnrSchedule read_schedule(const json& j, const std::string& path) {
    if (j.is_number()) return SnrSchedule::constant(j.get<double>());
    if (!j.is_array()) throw ConfigError(path + ": expected a number or [[step, snr_db], ...]");
    SnrSchedule s;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string p = path + "[" + std::to_string(i) + "]";
        if (!j[i].is_array() || j[i].size() != 2) throw ConfigError(p + ": expected [step, snr_db]");
        s.segments.push_back({read_as<int>(j[i][0], p + "[0]"), read_as<double>(j[i][1], p + "[1]")});
    }
    return s;
}

json schedule_json(const SnrSchedule& s) {
    if (s.segments.size() == 1 && s.segments[0].from_step == 1) return s.segments[0].snr_db;
    json out = json::array();
    for (const auto& seg : s.segments) out.push_back({seg.from_step, seg.snr_db});
    return out;
}

GridSpec read_grid(const json& j, const std::string& path) {
    require_object(j, path);
    reject_unknown(j, path, {"range", "doppler", "bearing"});
    double v[3][2];
    int n[3];
    const char* axes[3] = {"range", "doppler", "bearing"};
    for (int a = 0; a < 3; ++a) {
        const std::string p = join(path, axes[a]);
        if (!j.contains(axes[a])) throw ConfigError(p + ": missing field");
        const json& axis = j.at(axes[a]);
        if (!axis.is_array() || axis.size() != 3) throw ConfigError(p + ": expected [min, max, cells]");
        v[a][0] = read_as<double>(axis[0], p + "[0]");
        v[a][1] = read_as<double>(axis[1], p + "[1]");
        n[a] = read_as<int>(axis[2], p + "[2]");
    }
    try {
        return GridSpec(v[0][0], v[0][1], n[0], v[1][0], v[1][1], n[1], v[2][0], v[2][1], n[2]);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

std::string snr_mode_name(SnrMode m) {
    switch (m) {
        case SnrMode::known: return "known";
        case SnrMode::per_target: return "per_target";
        case SnrMode::unknown_range: return "unknown_range";
    }
    return "known";
}

}  // namespace

nlohmann::json scenario_to_json(const ScenarioSpec& spec) {
    const GridSpec& g = spec.grid;
    json events = json::array();
    for (const auto& ev : spec.events) {
        if (const auto* b = std::get_if<BirthEvent>(&ev)) {
            json e = {{"type", "birth"},
                      {"step", b->step},
                      {"state", {b->state.x(), b->state.vx(), b->state.y(), b->state.vy()}},
                      {"snr", schedule_json(b->snr)}};
            if (b->death_step) e["death_step"] = *b->death_step;
            events.push_back(e);
        } else {
            const auto& s = std::get<SpawnEvent>(ev);
            json e = {{"type", "spawn"},
                      {"step", s.step},
                      {"parent", s.parent_id},
                      {"dv", {s.dvx, s.dvy}},
                      {"snr", schedule_json(s.snr)}};
            if (s.death_step) e["death_step"] = *s.death_step;
            events.push_back(e);
        }
    }
    json out = {{"name", spec.name},
                {"grid",
                 {{"range", {g.r_min(), g.r_max(), g.n_range()}},
                  {"doppler", {g.d_min(), g.d_max(), g.n_doppler()}},
                  {"bearing", {g.b_min(), g.b_max(), g.n_bearing()}}}},
                {"sigma0", spec.sigma0},
                {"duration", spec.duration},
                {"dt", spec.dt},
                {"accel_noise_std", spec.accel_noise_std},
                {"snr_mode", snr_mode_name(spec.snr_mode)},
                {"events", events}};
    if (spec.snr_mode == SnrMode::unknown_range) out["snr_range"] = {spec.snr_low, spec.snr_high};
    return out;
}

ScenarioSpec scenario_from_json(const nlohmann::json& j, const std::string& path) {
    require_object(j, path);
    reject_unknown(j, path,
                   {"name", "grid", "sigma0", "duration", "dt", "accel_noise_std", "snr_mode", "snr_range", "events"});
    ScenarioSpec spec;
    read_opt(j, "name", path, spec.name);
    if (auto it = j.find("grid"); it != j.end()) spec.grid = read_grid(*it, join(path, "grid"));
    read_opt(j, "sigma0", path, spec.sigma0);
    read_opt(j, "duration", path, spec.duration);
    read_opt(j, "dt", path, spec.dt);
    read_opt(j, "accel_noise_std", path, spec.accel_noise_std);
    if (auto it = j.find("snr_mode"); it != j.end()) {
        const auto m = read_as<std::string>(*it, join(path, "snr_mode"));
        if (m == "known") spec.snr_mode = SnrMode::known;
        else if (m == "per_target") spec.snr_mode = SnrMode::per_target;
        else if (m == "unknown_range") spec.snr_mode = SnrMode::unknown_range;
        else throw ConfigError(join(path, "snr_mode") + ": expected known, per_target or unknown_range");
    }
    if (auto it = j.find("snr_range"); it != j.end()) {
        const auto r = read_number_list(*it, join(path, "snr_range"));
        if (r.size() != 2) throw ConfigError(join(path, "snr_range") + ": expected [low, high]");
        spec.snr_low = r[0];
        spec.snr_high = r[1];
    }
    if (auto it = j.find("events"); it != j.end()) {
        const std::string ep = join(path, "events");
        if (!it->is_array()) throw ConfigError(ep + ": expected an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const std::string p = ep + "[" + std::to_string(i) + "]";
            const json& e = (*it)[i];
            require_object(e, p);
            if (!e.contains("type")) throw ConfigError(join(p, "type") + ": missing field");
            const auto type = read_as<std::string>(e.at("type"), join(p, "type"));
            if (!e.contains("snr")) throw ConfigError(join(p, "snr") + ": missing field");
            std::optional<int> death;
            if (e.contains("death_step")) death = read_as<int>(e.at("death_step"), join(p, "death_step"));
            const int step = e.contains("step") ? read_as<int>(e.at("step"), join(p, "step")) : 1;
            if (type == "birth") {
                reject_unknown(e, p, {"type", "step", "state", "snr", "death_step"});
                if (!e.contains("state")) throw ConfigError(join(p, "state") + ": missing field");
                const auto s = read_number_list(e.at("state"), join(p, "state"));
                if (s.size() != 4) throw ConfigError(join(p, "state") + ": expected [x, vx, y, vy]");
                spec.events.push_back(BirthEvent{step, TargetState(s[0], s[1], s[2], s[3]),
                                                 read_schedule(e.at("snr"), join(p, "snr")), death});
            } else if (type == "spawn") {
                reject_unknown(e, p, {"type", "step", "parent", "dv", "snr", "death_step"});
                if (!e.contains("parent")) throw ConfigError(join(p, "parent") + ": missing field");
                std::vector<double> dv{0.0, 0.0};
                if (e.contains("dv")) dv = read_number_list(e.at("dv"), join(p, "dv"));
                if (dv.size() != 2) throw ConfigError(join(p, "dv") + ": expected [dvx, dvy]");
                spec.events.push_back(SpawnEvent{step, read_as<int>(e.at("parent"), join(p, "parent")), dv[0], dv[1],
                                                 read_schedule(e.at("snr"), join(p, "snr")), death});
            } else {
                throw ConfigError(join(p, "type") + ": expected birth or spawn");
            }
        }
    }
    spec.validate();
    return spec;
}

ScenarioSpec RunConfig::effective_scenario() const {
    ScenarioSpec s = scenario;
    if (snr_db) s.set_uniform_snr(*snr_db);
    return s;
}

void RunConfig::validate() const {
    if (trials < 1) throw ConfigError("trials: must be >= 1");
    if (threads < 0) throw ConfigError("threads: must be >= 0");
    scenario.validate();
    const auto& f = filter;
    if (!(f.survival > 0.0 && f.survival <= 1.0)) throw ConfigError("filter.survival: must lie in (0, 1]");
    if (f.particle_count == 0) throw ConfigError("filter.particle_count: must be positive");
    if (f.birth_count == 0) throw ConfigError("filter.birth_count: must be positive");
    if (!(f.birth_mass > 0.0)) throw ConfigError("filter.birth_mass: must be positive");
    if (f.spawn_mass < 0.0) throw ConfigError("filter.spawn_mass: must be >= 0");
    if (f.spawn_position_std < 0.0) throw ConfigError("filter.spawn_position_std: must be >= 0");
    if (f.spawn_velocity_std < 0.0) throw ConfigError("filter.spawn_velocity_std: must be >= 0");
    if (f.accel_noise_std < 0.0) throw ConfigError("filter.accel_noise_std: must be >= 0");
    if (f.intensity_jitter < 0.0) throw ConfigError("filter.intensity_jitter: must be >= 0");
    if (!(f.pd_target > 0.0 && f.pd_target < 1.0)) throw ConfigError("filter.pd_target: must lie in (0, 1)");
    if (!(f.beta > 0.0 && f.beta < 0.5)) throw ConfigError("filter.beta: must lie in (0, 0.5)");
    if (f.table_snr_grid.empty()) throw ConfigError("filter.table_snr_grid: must not be empty");
    for (std::size_t i = 1; i < f.table_snr_grid.size(); ++i)
        if (!(f.table_snr_grid[i] > f.table_snr_grid[i - 1]))
            throw ConfigError("filter.table_snr_grid[" + std::to_string(i) + "]: must increase");
    if (sweep_snr_db.empty()) throw ConfigError("sweep_snr_db: must not be empty");
}

RunConfig parse_run_config(const nlohmann::json& doc) {
    require_object(doc, "config");
    reject_unknown(doc, "", {"schema_version", "scenario", "filter", "trials", "seed", "out", "mode", "record_timing",
                             "threads", "sweep_snr_db"});
    if (!doc.contains("schema_version")) throw ConfigError("schema_version: missing field");
    const int version = read_as<int>(doc.at("schema_version"), "schema_version");
    if (version != RunConfig::kSchemaVersion)
        throw ConfigError("schema_version: unsupported version " + std::to_string(version));

    RunConfig cfg;
    if (auto it = doc.find("scenario"); it != doc.end()) {
        const json& s = *it;
        require_object(s, "scenario");
        if (s.contains("preset")) {
            reject_unknown(s, "scenario", {"preset", "snr_db"});
            cfg.preset = read_as<std::string>(s.at("preset"), "scenario.preset");
            cfg.scenario = scenario_preset(*cfg.preset);
        } else {
            json body = s;
            body.erase("snr_db");
            cfg.preset.reset();
            cfg.scenario = scenario_from_json(body, "scenario");
        }
        if (s.contains("snr_db")) cfg.snr_db = read_as<double>(s.at("snr_db"), "scenario.snr_db");
    }
    if (auto it = doc.find("filter"); it != doc.end()) {
        const json& f = *it;
        require_object(f, "filter");
        reject_unknown(f, "filter",
                       {"survival", "particle_count", "birth_count", "birth_mass", "spawn_mass", "spawn_position_std",
                        "spawn_velocity_std", "accel_noise_std", "intensity_jitter", "pd_target", "beta",
                        "clutter_density", "table_snr_grid", "force_identity_table"});
        auto& fs = cfg.filter;
        read_opt(f, "survival", "filter", fs.survival);
        read_opt(f, "particle_count", "filter", fs.particle_count);
        read_opt(f, "birth_count", "filter", fs.birth_count);
        read_opt(f, "birth_mass", "filter", fs.birth_mass);
        read_opt(f, "spawn_mass", "filter", fs.spawn_mass);
        read_opt(f, "spawn_position_std", "filter", fs.spawn_position_std);
        read_opt(f, "spawn_velocity_std", "filter", fs.spawn_velocity_std);
        read_opt(f, "accel_noise_std", "filter", fs.accel_noise_std);
        read_opt(f, "intensity_jitter", "filter", fs.intensity_jitter);
        read_opt(f, "pd_target", "filter", fs.pd_target);
        read_opt(f, "beta", "filter", fs.beta);
        read_opt(f, "force_identity_table", "filter", fs.force_identity_table);
        if (auto c = f.find("clutter_density"); c != f.end()) {
            const auto v = read_as<std::string>(*c, "filter.clutter_density");
            if (v == "scan") fs.clutter = ClutterDensity::scan;
            else if (v == "per_cell") fs.clutter = ClutterDensity::per_cell;
            else throw ConfigError("filter.clutter_density: expected scan or per_cell");
        }
        if (auto g = f.find("table_snr_grid"); g != f.end())
            fs.table_snr_grid = read_number_list(*g, "filter.table_snr_grid");
    }
    read_opt(doc, "trials", "", cfg.trials);
    read_opt(doc, "seed", "", cfg.seed);
    read_opt(doc, "out", "", cfg.out_dir);
    if (auto it = doc.find("mode"); it != doc.end()) cfg.mode = parse_run_mode(read_as<std::string>(*it, "mode"));
    read_opt(doc, "record_timing", "", cfg.record_timing);
    read_opt(doc, "threads", "", cfg.threads);
    if (auto it = doc.find("sweep_snr_db"); it != doc.end())
        cfg.sweep_snr_db = read_number_list(*it, "sweep_snr_db");
    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return parse_run_config(doc);
}

nlohmann::json to_json(const RunConfig& c) {
    const auto& f = c.filter;
    json scenario = c.preset ? json{{"preset", *c.preset}} : scenario_to_json(c.scenario);
    if (c.snr_db) scenario["snr_db"] = *c.snr_db;
    return {{"schema_version", RunConfig::kSchemaVersion},
            {"scenario", scenario},
            {"filter",
             {{"survival", f.survival},
              {"particle_count", f.particle_count},
              {"birth_count", f.birth_count},
              {"birth_mass", f.birth_mass},
              {"spawn_mass", f.spawn_mass},
              {"spawn_position_std", f.spawn_position_std},
              {"spawn_velocity_std", f.spawn_velocity_std},
              {"accel_noise_std", f.accel_noise_std},
              {"intensity_jitter", f.intensity_jitter},
              {"pd_target", f.pd_target},
              {"beta", f.beta},
              {"clutter_density", f.clutter == ClutterDensity::scan ? "scan" : "per_cell"},
              {"table_snr_grid", f.table_snr_grid},
              {"force_identity_table", f.force_identity_table}}},
            {"trials", c.trials},
            {"seed", c.seed},
            {"out", c.out_dir},
            {"mode", to_string(c.mode)},
            {"record_timing", c.record_timing},
            {"threads", c.threads},
            {"sweep_snr_db", c.sweep_snr_db}};
}

FilterConfig make_filter_config(const FilterSettings& s, const ScenarioSpec& scenario, UpdateMode mode,
                                const ShrinkageTable& table) {
    FilterConfig fc;
    fc.survival = s.survival;
    fc.particle_count = s.particle_count;
    fc.birth_count = s.birth_count;
    fc.birth_mass = s.birth_mass;
    fc.spawn_mass = s.spawn_mass;
    fc.spawn_position_std = s.spawn_position_std;
    fc.spawn_velocity_std = s.spawn_velocity_std;
    fc.accel_noise_std = s.accel_noise_std;
    fc.intensity_jitter = s.intensity_jitter;
    fc.pd_target = s.pd_target;
    fc.clutter = s.clutter;
    fc.mode = mode;
    if (mode == UpdateMode::shrinkage) fc.table = s.force_identity_table ? ShrinkageTable::identity() : table;

    const double sigma0 = scenario.sigma0;
    const auto snrs = scenario.all_snrs();
    std::vector<double> amplitudes;
    for (double snr : snrs) amplitudes.push_back(snr_to_intensity(snr, sigma0));
    switch (scenario.snr_mode) {
        case SnrMode::known: {
            const double lo = amplitudes.empty() ? 1.0 : *std::min_element(amplitudes.begin(), amplitudes.end());
            fc.intensity = IntensityPrior::known(lo);
            break;
        }
        case SnrMode::per_target:
            fc.intensity = amplitudes.empty() ? IntensityPrior::known(1.0) : IntensityPrior::from_set(amplitudes);
            break;
        case SnrMode::unknown_range:
            fc.intensity = scenario.snr_high > scenario.snr_low
                               ? IntensityPrior::range(snr_to_intensity(scenario.snr_low, sigma0),
                                                       snr_to_intensity(scenario.snr_high, sigma0))
                               : IntensityPrior::known(snr_to_intensity(scenario.snr_low, sigma0));
            break;
    }
    return fc;
}

}  // namespace tbd
