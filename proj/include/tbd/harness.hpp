#pragma once

#include "tbd/config.hpp"
#include "tbd/frame.hpp"
#include "tbd/scenario.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace tbd {

struct ResultRow {
    int trial = 0;
    int step = 0;
    std::string algorithm;
    double n_hat = 0.0;
    double ospa_position = 0.0;
    double ospa_velocity = 0.0;
    double wall_ms = 0.0;
};

struct DiagnosticRow {
    int trial = 0;
    int step = 0;
    std::string algorithm;
    std::uint64_t frame_checksum = 0;
    std::size_t measurements = 0;
    double ess = 0.0;
    double max_measurement_mass = 0.0;
    bool empty_measurement_set = false;
    bool components_reduced = false;
};

struct EstimateRow {
    int trial = 0;
    int step = 0;
    std::string algorithm;
    int component = 0;
    Eigen::Vector4d state = Eigen::Vector4d::Zero();
};

/// Rows in (trial, algorithm, step) order.
struct ExperimentResult {
    std::vector<ResultRow> rows;
    std::vector<DiagnosticRow> diagnostics;
    std::vector<EstimateRow> estimates;
};

/// Algorithms run for a mode, in output order.
std::vector<UpdateMode> algorithms_for(RunMode mode);
std::string algorithm_name(UpdateMode mode);

/// Truth tracks and frames of one trial, drawn from its own substreams.
struct TrialData {
    std::vector<TruthTrack> tracks;
    std::vector<PowerFrame> frames;  ///< frames[k - 1] is step k
};
TrialData simulate_trial(const ScenarioSpec& scenario, std::uint64_t seed, int trial);

/// Shrinkage table for a scenario's noise level (empty in plain-only runs).
ShrinkageTable table_for(const RunConfig& config, const ScenarioSpec& scenario);

/// Runs every algorithm of the mode on the same truth and frames in each
/// trial. Trials run in parallel; output order and content do not depend on
/// scheduling. wall_ms is zero unless record_timing is set.
ExperimentResult run_experiment(const RunConfig& config);
ExperimentResult run_experiment(const RunConfig& config, const ScenarioSpec& scenario, const ShrinkageTable& table);

/// Mean over (trial, step) of one algorithm's position OSPA, per trial.
std::vector<double> time_averaged_position_ospa(const ExperimentResult& result, const std::string& algorithm,
                                                int trials);

struct Table1Row {
    double snr_db = 0.0;
    double threshold = 0.0;
    double lambda = 0.0;
};
std::vector<Table1Row> reproduce_table1(double sigma0, std::size_t n_cells, std::span<const double> snr_db,
                                        double pd_target = 0.99);

struct Table2Row {
    double snr_db = 0.0;
    double sigma_ratio = 0.0;
};
std::vector<Table2Row> reproduce_table2(double sigma0, double beta, std::span<const double> snr_db,
                                        double pd_target = 0.99);

struct SweepRow {
    double snr_db = 0.0;
    std::string algorithm;
    int trials = 0;
    double ospa_position_mean = 0.0;
    double ospa_position_se = 0.0;
    double ospa_velocity_mean = 0.0;
    double ospa_velocity_se = 0.0;
};
std::vector<SweepRow> sweep_snr(const RunConfig& config, std::span<const double> snr_db);

void write_results_csv(std::ostream& out, std::span<const ResultRow> rows);
void write_summary_csv(std::ostream& out, std::span<const ResultRow> rows);
void write_diagnostics_csv(std::ostream& out, std::span<const DiagnosticRow> rows);
void write_estimates_csv(std::ostream& out, std::span<const EstimateRow> rows);
void write_table1_csv(std::ostream& out, std::span<const Table1Row> rows);
void write_table2_csv(std::ostream& out, std::span<const Table2Row> rows);
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);
void write_truth_csv(std::ostream& out, const std::vector<TruthTrack>& tracks, const ScenarioSpec& scenario);

/// Reads (step, state) pairs from a truth or estimate CSV; `algorithm`
/// filters estimate files and is ignored for truth files.
struct StateRecord {
    int step = 0;
    std::string algorithm;
    TargetState state;
};
std::vector<StateRecord> read_state_csv(std::istream& in);

}  // namespace tbd
