#include "tbd/harness.hpp"

#include "tbd/ospa.hpp"
#include "tbd/phd_filter.hpp"
#include "tbd/rician.hpp"
#include "tbd/threshold.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

namespace tbd {

std::vector<UpdateMode> algorithms_for(RunMode mode) {
    switch (mode) {
        case RunMode::plain: return {UpdateMode::plain};
        case RunMode::shrinkage: return {UpdateMode::shrinkage};
        case RunMode::both: return {UpdateMode::plain, UpdateMode::shrinkage};
    }
    return {};
}

std::string algorithm_name(UpdateMode mode) { return mode == UpdateMode::plain ? "plain" : "shrinkage"; }

TrialData simulate_trial(const ScenarioSpec& scenario, std::uint64_t seed, int trial) {
    const auto t = static_cast<std::uint64_t>(trial);
    Rng truth_rng = make_stream(seed, t, StreamRole::truth);
    Rng frame_rng = make_stream(seed, t, StreamRole::frames);
    TrialData data;
    data.tracks = generate_scenario(scenario, truth_rng);
    data.frames.reserve(static_cast<std::size_t>(scenario.duration));
    for (int step = 1; step <= scenario.duration; ++step) {
        const auto truth = truth_at(data.tracks, step);
        data.frames.push_back(render_frame(truth, scenario.grid, scenario.sigma0, step, frame_rng));
    }
    return data;
}

ShrinkageTable table_for(const RunConfig& config, const ScenarioSpec& scenario) {
    if (config.mode == RunMode::plain) return {};
    if (config.filter.force_identity_table) return ShrinkageTable::identity();
    return build_shrinkage_table(config.filter.table_snr_grid, scenario.sigma0, config.filter.beta,
                                 config.filter.pd_target);
}

namespace {

ExperimentResult run_trial(const RunConfig& config, const ScenarioSpec& scenario, const ShrinkageTable& table,
                           int trial) {
    const TrialData data = simulate_trial(scenario, config.seed, trial);
    ExperimentResult out;
    const auto t = static_cast<std::uint64_t>(trial);
    for (UpdateMode mode : algorithms_for(config.mode)) {
        const std::string name = algorithm_name(mode);
        PhdFilter filter(make_filter_config(config.filter, scenario, mode, table), scenario.grid, scenario.sigma0,
                         scenario.dt);
        Rng rng = make_stream(config.seed, t, StreamRole::filter);
        Rng extraction_rng = make_stream(config.seed, t, StreamRole::extraction);
        for (const PowerFrame& frame : data.frames) {
            const StepOutput step = filter.step(frame, rng, extraction_rng);
            const auto truth = truth_at(data.tracks, frame.time_step);
            const OspaComponents o = ospa_range_doppler(truth, step.estimates);
            const auto& d = step.diagnostics;
            out.rows.push_back({trial, frame.time_step, name, d.n_hat, o.position, o.velocity,
                                config.record_timing ? d.wall_ms : 0.0});
            out.diagnostics.push_back({trial, frame.time_step, name, frame_checksum(frame), d.measurements, d.ess,
                                       d.max_measurement_mass, d.empty_measurement_set, d.components_reduced});
            for (std::size_t c = 0; c < step.estimates.size(); ++c)
                out.estimates.push_back({trial, frame.time_step, name, static_cast<int>(c),
                                         step.estimates[c].kinematics});
        }
    }
    return out;
}

template <typename T>
void append(std::vector<T>& dst, std::vector<T>& src) {
    dst.insert(dst.end(), std::make_move_iterator(src.begin()), std::make_move_iterator(src.end()));
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& v) {
    MeanSe r;
    if (v.empty()) return r;
    double s = 0.0;
    for (double x : v) s += x;
    r.mean = s / static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - r.mean) * (x - r.mean);
        r.se = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
    }
    return r;
}

}  // namespace

ExperimentResult run_experiment(const RunConfig& config) {
    const ScenarioSpec scenario = config.effective_scenario();
    return run_experiment(config, scenario, table_for(config, scenario));
}

ExperimentResult run_experiment(const RunConfig& config, const ScenarioSpec& scenario, const ShrinkageTable& table) {
    config.validate();
    scenario.validate();
    const int trials = config.trials;
    std::vector<ExperimentResult> per_trial(static_cast<std::size_t>(trials));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(trials));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int t = next++; t < trials; t = next++) {
            try {
                per_trial[static_cast<std::size_t>(t)] = run_trial(config, scenario, table, t);
            } catch (...) {
                errors[static_cast<std::size_t>(t)] = std::current_exception();
            }
        }
    };
    unsigned n_threads = config.threads > 0 ? static_cast<unsigned>(config.threads)
                                            : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min(n_threads, static_cast<unsigned>(trials));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    ExperimentResult all;
    for (auto& r : per_trial) {
        append(all.rows, r.rows);
        append(all.diagnostics, r.diagnostics);
        append(all.estimates, r.estimates);
    }
    return all;
}

std::vector<double> time_averaged_position_ospa(const ExperimentResult& result, const std::string& algorithm,
                                                int trials) {
    std::vector<double> sum(static_cast<std::size_t>(trials), 0.0);
    std::vector<int> count(static_cast<std::size_t>(trials), 0);
    for (const auto& r : result.rows) {
        if (r.algorithm != algorithm || r.trial < 0 || r.trial >= trials) continue;
        sum[static_cast<std::size_t>(r.trial)] += r.ospa_position;
        ++count[static_cast<std::size_t>(r.trial)];
    }
    for (std::size_t t = 0; t < sum.size(); ++t)
        if (count[t] > 0) sum[t] /= count[t];
    return sum;
}

std::vector<Table1Row> reproduce_table1(double sigma0, std::size_t n_cells, std::span<const double> snr_db,
                                        double pd_target) {
    std::vector<Table1Row> out;
    for (double snr : snr_db) {
        const double theta = solve_threshold(snr_to_intensity(snr, sigma0), sigma0, pd_target);
        out.push_back({snr, theta, expected_clutter_count(theta, sigma0, n_cells)});
    }
    return out;
}

std::vector<Table2Row> reproduce_table2(double sigma0, double beta, std::span<const double> snr_db,
                                        double pd_target) {
    const ShrinkageTable table = build_shrinkage_table(snr_db, sigma0, beta, pd_target);
    std::vector<Table2Row> out;
    for (const auto& [snr, ratio] : table.entries()) out.push_back({snr, ratio});
    return out;
}

std::vector<SweepRow> sweep_snr(const RunConfig& config, std::span<const double> snr_db) {
    std::vector<SweepRow> out;
    for (double snr : snr_db) {
        RunConfig cfg = config;
        cfg.snr_db = snr;
        const ScenarioSpec scenario = cfg.effective_scenario();
        const ExperimentResult res = run_experiment(cfg, scenario, table_for(cfg, scenario));
        for (UpdateMode mode : algorithms_for(cfg.mode)) {
            const std::string name = algorithm_name(mode);
            std::vector<double> pos(static_cast<std::size_t>(cfg.trials), 0.0);
            std::vector<double> vel(static_cast<std::size_t>(cfg.trials), 0.0);
            std::vector<int> n(static_cast<std::size_t>(cfg.trials), 0);
            for (const auto& r : res.rows) {
                if (r.algorithm != name) continue;
                const auto t = static_cast<std::size_t>(r.trial);
                pos[t] += r.ospa_position;
                vel[t] += r.ospa_velocity;
                ++n[t];
            }
            for (std::size_t t = 0; t < pos.size(); ++t) {
                pos[t] /= std::max(1, n[t]);
                vel[t] /= std::max(1, n[t]);
            }
            const MeanSe p = mean_se(pos);
            const MeanSe v = mean_se(vel);
            out.push_back({snr, name, cfg.trials, p.mean, p.se, v.mean, v.se});
        }
    }
    return out;
}

void write_results_csv(std::ostream& out, std::span<const ResultRow> rows) {
    out << "trial,step,algorithm,n_hat,ospa_position,ospa_velocity,wall_ms\n";
    for (const auto& r : rows)
        out << r.trial << ',' << r.step << ',' << r.algorithm << ',' << fmt(r.n_hat) << ',' << fmt(r.ospa_position)
            << ',' << fmt(r.ospa_velocity) << ',' << fmt(r.wall_ms) << '\n';
}

void write_summary_csv(std::ostream& out, std::span<const ResultRow> rows) {
    std::vector<std::string> algorithms;
    std::map<std::pair<std::string, int>, std::vector<const ResultRow*>> groups;
    for (const auto& r : rows) {
        if (std::find(algorithms.begin(), algorithms.end(), r.algorithm) == algorithms.end())
            algorithms.push_back(r.algorithm);
        groups[{r.algorithm, r.step}].push_back(&r);
    }
    out << "step,algorithm,trials,n_hat_mean,n_hat_se,ospa_position_mean,ospa_position_se,ospa_velocity_mean,"
           "ospa_velocity_se\n";
    for (const auto& alg : algorithms) {
        for (const auto& [key, members] : groups) {
            if (key.first != alg) continue;
            std::vector<double> n, p, v;
            for (const auto* r : members) {
                n.push_back(r->n_hat);
                p.push_back(r->ospa_position);
                v.push_back(r->ospa_velocity);
            }
            const MeanSe mn = mean_se(n), mp = mean_se(p), mv = mean_se(v);
            out << key.second << ',' << alg << ',' << members.size() << ',' << fmt(mn.mean) << ',' << fmt(mn.se)
                << ',' << fmt(mp.mean) << ',' << fmt(mp.se) << ',' << fmt(mv.mean) << ',' << fmt(mv.se) << '\n';
        }
    }
}

void write_diagnostics_csv(std::ostream& out, std::span<const DiagnosticRow> rows) {
    out << "trial,step,algorithm,frame_checksum,measurements,ess,max_measurement_mass,empty_measurement_set,"
           "components_reduced\n";
    for (const auto& r : rows) {
        char sum[24];
        std::snprintf(sum, sizeof sum, "%016llx", static_cast<unsigned long long>(r.frame_checksum));
        out << r.trial << ',' << r.step << ',' << r.algorithm << ',' << sum << ',' << r.measurements << ','
            << fmt(r.ess) << ',' << fmt(r.max_measurement_mass) << ',' << (r.empty_measurement_set ? 1 : 0) << ','
            << (r.components_reduced ? 1 : 0) << '\n';
    }
}

void write_estimates_csv(std::ostream& out, std::span<const EstimateRow> rows) {
    out << "trial,step,algorithm,component,x,vx,y,vy\n";
    for (const auto& r : rows)
        out << r.trial << ',' << r.step << ',' << r.algorithm << ',' << r.component << ',' << fmt(r.state(0)) << ','
            << fmt(r.state(1)) << ',' << fmt(r.state(2)) << ',' << fmt(r.state(3)) << '\n';
}

void write_table1_csv(std::ostream& out, std::span<const Table1Row> rows) {
    out << "snr_db,threshold,lambda\n";
    for (const auto& r : rows) out << fmt(r.snr_db) << ',' << fmt(r.threshold) << ',' << fmt(r.lambda) << '\n';
}

void write_table2_csv(std::ostream& out, std::span<const Table2Row> rows) {
    out << "snr_db,sigma_ratio\n";
    for (const auto& r : rows) out << fmt(r.snr_db) << ',' << fmt(r.sigma_ratio) << '\n';
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
    out << "snr_db,algorithm,trials,ospa_position_mean,ospa_position_se,ospa_velocity_mean,ospa_velocity_se\n";
    for (const auto& r : rows)
        out << fmt(r.snr_db) << ',' << r.algorithm << ',' << r.trials << ',' << fmt(r.ospa_position_mean) << ','
            << fmt(r.ospa_position_se) << ',' << fmt(r.ospa_velocity_mean) << ',' << fmt(r.ospa_velocity_se) << '\n';
}

void write_truth_csv(std::ostream& out, const std::vector<TruthTrack>& tracks, const ScenarioSpec& scenario) {
    out << "step,id,x,vx,y,vy,snr_db\n";
    for (int step = 1; step <= scenario.duration; ++step) {
        for (const auto& t : tracks) {
            if (!t.alive_at(step)) continue;
            const TargetState& s = t.at(step);
            const double snr = s.intensity ? intensity_to_snr(*s.intensity, scenario.sigma0) : 0.0;
            out << step << ',' << t.id << ',' << fmt(s.x()) << ',' << fmt(s.vx()) << ',' << fmt(s.y()) << ','
                << fmt(s.vy()) << ',' << fmt(snr) << '\n';
        }
    }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

std::vector<StateRecord> read_state_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("csv: missing header row");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_csv_line(line);
    auto column = [&](const std::string& name) -> int {
        const auto it = std::find(header.begin(), header.end(), name);
        return it == header.end() ? -1 : static_cast<int>(it - header.begin());
    };
    const int c_step = column("step"), c_x = column("x"), c_vx = column("vx"), c_y = column("y"),
              c_vy = column("vy"), c_alg = column("algorithm");
    if (c_step < 0 || c_x < 0 || c_vx < 0 || c_y < 0 || c_vy < 0)
        throw ConfigError("csv: header needs step, x, vx, y, vy columns");
    std::vector<StateRecord> out;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw ConfigError("csv: line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                              " fields, expected " + std::to_string(header.size()));
        try {
            StateRecord r;
            r.step = std::stoi(cells[static_cast<std::size_t>(c_step)]);
            r.algorithm = c_alg >= 0 ? cells[static_cast<std::size_t>(c_alg)] : "truth";
            r.state = TargetState(std::stod(cells[static_cast<std::size_t>(c_x)]),
                                  std::stod(cells[static_cast<std::size_t>(c_vx)]),
                                  std::stod(cells[static_cast<std::size_t>(c_y)]),
                                  std::stod(cells[static_cast<std::size_t>(c_vy)]));
            out.push_back(r);
        } catch (const std::logic_error&) {
            throw ConfigError("csv: line " + std::to_string(line_no) + " has a malformed number");
        }
    }
    return out;
}

}  // namespace tbd
