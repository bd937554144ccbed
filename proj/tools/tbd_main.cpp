#include "tbd/config.hpp"
#include "tbd/harness.hpp"
#include "tbd/ospa.hpp"
#include "tbd/phd_filter.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

namespace fs = std::filesystem;

namespace {

struct CommonOptions {
    std::string config_path;
    std::string preset;
    std::uint64_t seed = 0;
    int trials = 0;
    std::string out;
    std::string mode;
    bool seed_set = false;
};

void add_common(CLI::App* app, CommonOptions& o) {
    app->add_option("--config", o.config_path, "JSON run configuration");
    app->add_option("--preset", o.preset, "built-in scenario");
    app->add_option("--seed", o.seed, "64-bit master seed");
    app->add_option("--trials", o.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
    app->add_option("--out", o.out, "output directory");
    app->add_option("--mode", o.mode, "plain|shrinkage|both")->check(CLI::IsMember({"plain", "shrinkage", "both"}));
}

tbd::RunConfig resolve(const CommonOptions& o, CLI::App* app) {
    tbd::RunConfig cfg = o.config_path.empty() ? tbd::RunConfig{} : tbd::load_run_config(o.config_path);
    if (!o.preset.empty()) {
        cfg.scenario = tbd::scenario_preset(o.preset);
        cfg.preset = o.preset;
    }
    if (app->count("--seed") > 0) cfg.seed = o.seed;
    if (o.trials > 0) cfg.trials = o.trials;
    if (!o.out.empty()) cfg.out_dir = o.out;
    if (!o.mode.empty()) cfg.mode = tbd::parse_run_mode(o.mode);
    cfg.validate();
    return cfg;
}

std::ofstream open_output(const std::string& dir, const std::string& name) {
    fs::create_directories(dir);
    const fs::path path = fs::path(dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

void write_resolved_config(const tbd::RunConfig& cfg) {
    auto out = open_output(cfg.out_dir, "config.json");
    out << tbd::to_json(cfg).dump(2) << '\n';
}

int cmd_simulate(const tbd::RunConfig& cfg, int trial) {
    const auto scenario = cfg.effective_scenario();
    const auto data = tbd::simulate_trial(scenario, cfg.seed, trial);
    {
        auto out = open_output(cfg.out_dir, "truth.csv");
        tbd::write_truth_csv(out, data.tracks, scenario);
    }
    auto out = open_output(cfg.out_dir, "frames.bin");
    for (const auto& f : data.frames) tbd::write_frame(out, f);
    write_resolved_config(cfg);
    std::printf("wrote %zu frames for trial %d to %s\n", data.frames.size(), trial, cfg.out_dir.c_str());
    return 0;
}

int cmd_track_frames(const tbd::RunConfig& cfg, const std::string& frames_path, int trial) {
    std::ifstream in(frames_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + frames_path);
    const auto frames = tbd::read_frames(in);
    if (frames.empty()) throw std::runtime_error(frames_path + " holds no frames");
    auto scenario = cfg.effective_scenario();
    scenario.grid = frames.front().grid;
    const auto table = tbd::table_for(cfg, scenario);

    std::vector<tbd::EstimateRow> estimates;
    std::vector<tbd::DiagnosticRow> diagnostics;
    const auto t = static_cast<std::uint64_t>(trial);
    for (auto mode : tbd::algorithms_for(cfg.mode)) {
        const auto name = tbd::algorithm_name(mode);
        tbd::PhdFilter filter(tbd::make_filter_config(cfg.filter, scenario, mode, table), scenario.grid,
                              scenario.sigma0, scenario.dt);
        auto rng = tbd::make_stream(cfg.seed, t, tbd::StreamRole::filter);
        auto xrng = tbd::make_stream(cfg.seed, t, tbd::StreamRole::extraction);
        for (const auto& frame : frames) {
            const auto step = filter.step(frame, rng, xrng);
            const auto& d = step.diagnostics;
            diagnostics.push_back({trial, frame.time_step, name, tbd::frame_checksum(frame), d.measurements, d.ess,
                                   d.max_measurement_mass, d.empty_measurement_set, d.components_reduced});
            for (std::size_t c = 0; c < step.estimates.size(); ++c)
                estimates.push_back({trial, frame.time_step, name, static_cast<int>(c), step.estimates[c].kinematics});
        }
    }
    {
        auto out = open_output(cfg.out_dir, "estimates.csv");
        tbd::write_estimates_csv(out, estimates);
    }
    auto out = open_output(cfg.out_dir, "diagnostics.csv");
    tbd::write_diagnostics_csv(out, diagnostics);
    std::printf("tracked %zu frames; wrote estimates.csv and diagnostics.csv to %s\n", frames.size(),
                cfg.out_dir.c_str());
    return 0;
}

int cmd_track_mc(const tbd::RunConfig& cfg) {
    const auto result = tbd::run_experiment(cfg);
    {
        auto out = open_output(cfg.out_dir, "results.csv");
        tbd::write_results_csv(out, result.rows);
    }
    {
        auto out = open_output(cfg.out_dir, "summary.csv");
        tbd::write_summary_csv(out, result.rows);
    }
    {
        auto out = open_output(cfg.out_dir, "diagnostics.csv");
        tbd::write_diagnostics_csv(out, result.diagnostics);
    }
    auto out = open_output(cfg.out_dir, "estimates.csv");
    tbd::write_estimates_csv(out, result.estimates);
    write_resolved_config(cfg);
    for (auto mode : tbd::algorithms_for(cfg.mode)) {
        const auto name = tbd::algorithm_name(mode);
        const auto avg = tbd::time_averaged_position_ospa(result, name, cfg.trials);
        double s = 0.0;
        for (double v : avg) s += v;
        std::printf("%-10s mean position OSPA %.3f m over %d trials\n", name.c_str(), s / cfg.trials, cfg.trials);
    }
    return 0;
}

int cmd_ospa(const std::string& truth_path, const std::string& est_path, const std::string& out_dir,
             double c_pos, double c_vel) {
    std::ifstream tin(truth_path), ein(est_path);
    if (!tin) throw std::runtime_error("cannot open " + truth_path);
    if (!ein) throw std::runtime_error("cannot open " + est_path);
    const auto truth = tbd::read_state_csv(tin);
    const auto est = tbd::read_state_csv(ein);
    std::map<int, std::vector<tbd::TargetState>> truth_by_step;
    std::set<int> steps;
    for (const auto& r : truth) {
        truth_by_step[r.step].push_back(r.state);
        steps.insert(r.step);
    }
    std::vector<std::string> algorithms;
    std::map<std::pair<std::string, int>, std::vector<tbd::TargetState>> est_by_step;
    for (const auto& r : est) {
        if (std::find(algorithms.begin(), algorithms.end(), r.algorithm) == algorithms.end())
            algorithms.push_back(r.algorithm);
        est_by_step[{r.algorithm, r.step}].push_back(r.state);
        steps.insert(r.step);
    }
    auto out = open_output(out_dir, "ospa.csv");
    out << "step,algorithm,ospa_position,ospa_velocity\n";
    for (const auto& alg : algorithms) {
        for (int step : steps) {
            const auto o = tbd::ospa_range_doppler(truth_by_step[step], est_by_step[{alg, step}], c_pos, c_vel);
            char buf[96];
            std::snprintf(buf, sizeof buf, "%d,%s,%.12g,%.12g\n", step, alg.c_str(), o.position, o.velocity);
            out << buf;
        }
    }
    std::printf("wrote ospa.csv for %zu algorithm(s) to %s\n", algorithms.size(), out_dir.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Track-before-detect PHD filtering toolkit"};
    app.require_subcommand(1);

    CommonOptions sim_opts, track_opts, t1_opts, t2_opts, sweep_opts;
    int sim_trial = 0;
    auto* sim = app.add_subcommand("simulate", "Write truth and frames of one trial");
    add_common(sim, sim_opts);
    sim->add_option("--trial", sim_trial, "trial index")->check(CLI::NonNegativeNumber);

    std::string frames_path;
    int track_trial = 0;
    auto* track = app.add_subcommand("track", "Run the filters (Monte Carlo, or on a frame file)");
    add_common(track, track_opts);
    track->add_option("--frames", frames_path, "binary frame file from simulate");
    track->add_option("--trial", track_trial, "trial index for the filter streams")->check(CLI::NonNegativeNumber);

    std::vector<double> t1_snr{6, 7, 8, 9, 10};
    std::size_t t1_cells = 0;
    auto* t1 = app.add_subcommand("table1", "Clutter count versus SNR");
    add_common(t1, t1_opts);
    t1->add_option("--snr", t1_snr, "SNR list (dB)");
    t1->add_option("--cells", t1_cells, "number of cells (default: scenario grid)");

    std::vector<double> t2_snr{6, 7, 8, 9, 10, 11, 12, 13};
    auto* t2 = app.add_subcommand("table2", "Optimal shrinkage ratio versus SNR");
    add_common(t2, t2_opts);
    t2->add_option("--snr", t2_snr, "SNR list (dB)");

    std::vector<double> sweep_list;
    auto* sweep = app.add_subcommand("sweep", "Time-averaged OSPA versus SNR");
    add_common(sweep, sweep_opts);
    sweep->add_option("--snr", sweep_list, "SNR list (dB), default from config");

    std::string truth_path, est_path, ospa_out = ".";
    double c_pos = 250.0, c_vel = 50.0;
    auto* ospa = app.add_subcommand("ospa", "Score an estimate file against a truth file");
    ospa->add_option("--truth", truth_path, "truth CSV")->required();
    ospa->add_option("--estimates", est_path, "estimate CSV")->required();
    ospa->add_option("--out", ospa_out, "output directory");
    ospa->add_option("--position-cutoff", c_pos, "metres")->check(CLI::PositiveNumber);
    ospa->add_option("--velocity-cutoff", c_vel, "m/s")->check(CLI::PositiveNumber);

    std::string dump;
    auto* presets = app.add_subcommand("presets", "List built-in scenarios");
    presets->add_option("--dump", dump, "print a preset as a full configuration document");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(resolve(sim_opts, sim), sim_trial);
        if (track->parsed()) {
            const auto cfg = resolve(track_opts, track);
            return frames_path.empty() ? cmd_track_mc(cfg) : cmd_track_frames(cfg, frames_path, track_trial);
        }
        if (t1->parsed()) {
            const auto cfg = resolve(t1_opts, t1);
            const auto sc = cfg.effective_scenario();
            const auto rows = tbd::reproduce_table1(sc.sigma0, t1_cells > 0 ? t1_cells : sc.grid.size(), t1_snr,
                                                    cfg.filter.pd_target);
            auto out = open_output(cfg.out_dir, "table1.csv");
            tbd::write_table1_csv(out, rows);
            tbd::write_table1_csv(std::cout, rows);
            return 0;
        }
        if (t2->parsed()) {
            const auto cfg = resolve(t2_opts, t2);
            const auto sc = cfg.effective_scenario();
            const auto rows = tbd::reproduce_table2(sc.sigma0, cfg.filter.beta, t2_snr, cfg.filter.pd_target);
            auto out = open_output(cfg.out_dir, "table2.csv");
            tbd::write_table2_csv(out, rows);
            tbd::write_table2_csv(std::cout, rows);
            return 0;
        }
        if (sweep->parsed()) {
            auto cfg = resolve(sweep_opts, sweep);
            if (!sweep_list.empty()) cfg.sweep_snr_db = sweep_list;
            const auto rows = tbd::sweep_snr(cfg, cfg.sweep_snr_db);
            auto out = open_output(cfg.out_dir, "sweep.csv");
            tbd::write_sweep_csv(out, rows);
            write_resolved_config(cfg);
            tbd::write_sweep_csv(std::cout, rows);
            return 0;
        }
        if (ospa->parsed()) return cmd_ospa(truth_path, est_path, ospa_out, c_pos, c_vel);
        if (presets->parsed()) {
            if (dump.empty()) {
                for (const auto& name : tbd::preset_names()) std::printf("%s\n", name.c_str());
                return 0;
            }
            tbd::RunConfig cfg;
            cfg.scenario = tbd::scenario_preset(dump);
            cfg.preset.reset();
            std::printf("%s\n", tbd::to_json(cfg).dump(2).c_str());
            return 0;
        }
    } catch (const tbd::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
